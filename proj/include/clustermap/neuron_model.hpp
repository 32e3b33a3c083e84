#pragma once

#include <map>
#include <string>
#include <string_view>
#include <variant>

#include <Eigen/Dense>

namespace clustermap {

using State = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Classic squid-axon model with a bias current that puts it in the tonic
// spiking regime. State (V, m, h, n).
struct HodgkinHuxleyParams {
	double I_b  = 10.0;   // uA/cm^2
	double g_Na = 120.0;  // mS/cm^2
	double g_K  = 36.0;
	double g_L  = 0.3;
	double V_Na = 50.0;   // mV
	double V_K  = -77.0;
	double V_L  = -54.4;
	double c    = 1.0;    // uF/cm^2
};

// Reduced thalamocortical relay cell with a T-type calcium current.
// State (V, h, r).
struct ThalamicParams {
	double C_m  = 1.0;
	double g_L  = 0.05;
	double e_L  = -70.0;
	double g_Na = 3.0;
	double e_Na = 50.0;
	double g_K  = 5.0;
	double e_K  = -90.0;
	double g_T  = 5.0;
	double e_T  = 0.0;
	double I_b  = 5.0;
};

enum class ModelKind { HodgkinHuxley, Thalamic };

ModelKind parse_model_kind(std::string_view name);
std::string_view to_string(ModelKind kind);

// A conductance-based neuron as an autonomous vector field F(x) plus a
// current input that enters the voltage equation only. Value type; cheap
// to copy and safe to share across threads.
class NeuronModel {
public:
	explicit NeuronModel(ModelKind kind);
	explicit NeuronModel(HodgkinHuxleyParams params);
	explicit NeuronModel(ThalamicParams params);

	static NeuronModel hodgkin_huxley() { return NeuronModel(ModelKind::HodgkinHuxley); }
	static NeuronModel thalamic() { return NeuronModel(ModelKind::Thalamic); }

	ModelKind kind() const;
	std::string_view name() const { return to_string(kind()); }
	int state_dim() const;
	int voltage_index() const { return 0; }
	double capacitance() const;

	// Flat name -> value view of the parameter set, e.g. {"I_b", 10}.
	std::map<std::string, double> params() const;
	void set_param(std::string_view key, double value);

	// A resting-ish starting point: V = -65 mV with gates at steady state.
	State initial_state() const;

	// dx/dt in 1/ms. input_current in uA/cm^2.
	State eval_rhs(const State& x, double input_current = 0.0) const;
	Matrix eval_jacobian(const State& x) const;

	const std::variant<HodgkinHuxleyParams, ThalamicParams>& parameters() const { return params_; }

private:
	void check_dim(const State& x) const;

	std::variant<HodgkinHuxleyParams, ThalamicParams> params_;
};

} // namespace clustermap
