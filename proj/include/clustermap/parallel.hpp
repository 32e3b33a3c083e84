#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace clustermap {

// Runs body(i) for i in [0, count) on up to `jobs` threads. Each index is
// handled exactly once, so writing results into slot i keeps the outcome
// independent of scheduling. The first exception thrown is rethrown.
template <typename Body>
void parallel_for(std::size_t count, unsigned jobs, Body&& body)
{
	jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
	if (jobs <= 1) {
		for (std::size_t i = 0; i < count; ++i)
			body(i);
		return;
	}

	std::atomic<std::size_t> next{0};
	std::exception_ptr error;
	std::mutex error_mutex;
	auto worker = [&] {
		for (std::size_t i = next++; i < count; i = next++) {
			try {
				body(i);
			} catch (...) {
				std::lock_guard lock(error_mutex);
				if (!error)
					error = std::current_exception();
			}
		}
	};

	std::vector<std::jthread> pool;
	pool.reserve(jobs);
	for (unsigned j = 0; j < jobs; ++j)
		pool.emplace_back(worker);
	pool.clear();
	if (error)
		std::rethrow_exception(error);
}

} // namespace clustermap
