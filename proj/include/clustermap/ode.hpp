#pragma once

namespace clustermap {

// One classical fourth-order Runge-Kutta step of dx/dt = rhs(t, x).
// Works for scalars and for Eigen vectors alike.
template <typename State, typename Rhs>
State rk4_step(const Rhs& rhs, double t, const State& x, double h)
{
	const State k1 = rhs(t, x);
	const State k2 = rhs(t + 0.5 * h, State(x + (0.5 * h) * k1));
	const State k3 = rhs(t + 0.5 * h, State(x + (0.5 * h) * k2));
	const State k4 = rhs(t + h, State(x + h * k3));
	return State(x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

} // namespace clustermap
