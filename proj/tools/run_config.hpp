#pragma once

#include "nems/nems.hpp"

#include <cmath>
#include <set>
#include <string>

namespace nems::cli
{

inline const std::set<std::string, std::less<>>& known_keys()
{
	static const std::set<std::string, std::less<>> keys = {
		// circuit (SI)
		"L1", "L2", "C1", "C2", "d", "A", "m", "nu_rad_s", "mean_phonon_number", "drop_xrms", "resonance_tolerance",
		// readout (rad/s)
		"F_re_rad_s", "F_im_rad_s", "kappa1_rad_s", "kappa2_rad_s", "regime", "current_points", "current_tau_max",
		// entanglement
		"alpha", "beta", "gamma", "entropy_terms", "entropy_points", "fig4_alpha_max", "fig4_alpha_steps",
		"oracle_dim",
		// classical circuit
		"classical_x0_m", "classical_nu_ratio", "classical_periods", "classical_samples", "classical_rel_tol",
		"classical_drift_rel_tol",
		"classical_Q1_C", "classical_P1_Wb", "classical_Q2_C", "classical_P2_Wb", "classical_v_ct_V",
		// tolerances
		"tol_ratio", "tol_current_residual", "tol_elimination", "tol_elimination_order", "tol_entropy_symmetry",
		"tol_entropy_endpoint", "tol_tail", "tol_entropy_oracle", "tol_cat_fidelity", "tol_separability",
		"tol_spectral", "tol_energy_drift",
		// sensitivity probe for verify
		"verify_theta_scale",
	};
	return keys;
}

struct Tolerances
{
	double ratio = 1e-12;
	double current_residual = 1e-8;
	double elimination = 1e-2;
	double elimination_order = 1.95; // minimum fitted log-log slope
	double entropy_symmetry = 1e-12;
	double entropy_endpoint = 1e-10;
	double tail = 1e-12;
	double entropy_oracle = 1e-6;
	double cat_fidelity = 1e-10;
	double separability = 1e-8;
	double spectral = 2e-2;
	double energy_drift = 1e-8;
};

/// Parsed configuration, SI at the boundary. Missing readout rates default to
/// kappa2 = 100 theta0, kappa1 = kappa2 and F = i * 5 kappa2 (alpha2 = 10).
struct RunConfig
{
	PhysicalCircuitParams circuit;
	EffectiveParamsOptions effective;

	bool has_F = false;
	cplx F_si{0.0, 0.0};
	double kappa1_si = 0.0; // 0: derived default
	double kappa2_si = 0.0;
	RegimeMode regime = RegimeMode::permissive;
	std::size_t current_points = 200;
	double current_tau_max = 10.0;

	CoherentTriple triple{2.0, 2.0, 2.0};
	std::size_t entropy_terms = default_term_count;
	std::size_t entropy_points = 201;
	double fig4_alpha_max = 3.0;
	std::size_t fig4_alpha_steps = 31;
	std::size_t oracle_dim = 30;

	double classical_x0 = -1.0; // <0: d * sqrt(2e-6)
	double classical_nu_ratio = 10.0;
	double classical_periods = 400.0;
	std::size_t classical_samples = 16384;
	double classical_rel_tol = 1e-10;
	double classical_drift_rel_tol = 1e-12; // energy-drift run only
	double classical_Q1 = 1e-15;
	double classical_P1 = 0.0;
	double classical_Q2 = 0.0;
	double classical_P2 = 0.0;
	double classical_v_ct = 0.0;

	Tolerances tol;
	double verify_theta_scale = 1.0;

	[[nodiscard]] EffectiveParams effective_params() const { return nems::effective_params(circuit, effective); }

	[[nodiscard]] double kappa2() const
	{
		return kappa2_si > 0.0 ? kappa2_si : 100.0 * effective_params().theta0;
	}
	[[nodiscard]] double kappa1() const { return kappa1_si > 0.0 ? kappa1_si : kappa2(); }
	[[nodiscard]] cplx F() const { return has_F ? F_si : cplx{0.0, 5.0 * kappa2()}; }

	/// Readout in units of kappa2.
	[[nodiscard]] ReadoutParams readout() const
	{
		const auto eff = effective_params();
		return make_readout_params(eff, circuit, F(), kappa1(), kappa2(), UnitSystem{kappa2()}, regime);
	}

	[[nodiscard]] double x0() const { return classical_x0 >= 0.0 ? classical_x0 : circuit.d * std::sqrt(2e-6); }
};

inline RunConfig make_run_config(const KeyValueConfig& kv)
{
	RunConfig rc;
	auto& c = rc.circuit;
	c.L1 = kv.get("L1", c.L1);
	c.L2 = kv.get("L2", c.L2);
	c.C1 = kv.get("C1", c.C1);
	c.C2 = kv.get("C2", c.C2);
	c.d = kv.get("d", c.d);
	c.A = kv.get("A", c.A);
	c.m = kv.get("m", c.m);
	c.nu = kv.get("nu_rad_s", c.nu);
	c.validate();

	rc.effective.mean_phonon_number = kv.get("mean_phonon_number", 0.0);
	rc.effective.drop_xrms = kv.get_bool("drop_xrms", false);
	rc.effective.resonance_tolerance = kv.get("resonance_tolerance", rc.effective.resonance_tolerance);
	if(rc.effective.mean_phonon_number < 0.0)
	{
		throw InputError("mean_phonon_number must be >= 0");
	}

	rc.has_F = kv.has("F_re_rad_s") || kv.has("F_im_rad_s");
	rc.F_si = {kv.get("F_re_rad_s", 0.0), kv.get("F_im_rad_s", 0.0)};
	rc.kappa1_si = kv.get("kappa1_rad_s", 0.0);
	rc.kappa2_si = kv.get("kappa2_rad_s", 0.0);
	if(rc.kappa1_si < 0.0 || rc.kappa2_si < 0.0 || (kv.has("kappa1_rad_s") && rc.kappa1_si == 0.0)
	   || (kv.has("kappa2_rad_s") && rc.kappa2_si == 0.0))
	{
		throw InputError("kappa1_rad_s and kappa2_rad_s must be > 0");
	}
	const auto regime = kv.get_string("regime", "permissive");
	if(regime == "strict")
	{
		rc.regime = RegimeMode::strict;
	}
	else if(regime != "permissive")
	{
		throw InputError("regime must be 'strict' or 'permissive'");
	}
	rc.current_points = kv.get_count("current_points", rc.current_points);
	rc.current_tau_max = kv.get("current_tau_max", rc.current_tau_max);
	if(rc.current_points < 2 || !(rc.current_tau_max > 0.0))
	{
		throw InputError("current_points >= 2 and current_tau_max > 0 required");
	}

	rc.triple.alpha = kv.get_complex("alpha", rc.triple.alpha);
	rc.triple.beta = kv.get_complex("beta", rc.triple.beta);
	rc.triple.gamma = kv.get_complex("gamma", rc.triple.gamma);
	rc.triple.validate();
	rc.entropy_terms = kv.get_count("entropy_terms", rc.entropy_terms);
	rc.entropy_points = kv.get_count("entropy_points", rc.entropy_points);
	rc.fig4_alpha_max = kv.get("fig4_alpha_max", rc.fig4_alpha_max);
	rc.fig4_alpha_steps = kv.get_count("fig4_alpha_steps", rc.fig4_alpha_steps);
	rc.oracle_dim = kv.get_count("oracle_dim", rc.oracle_dim);
	if(rc.entropy_terms < 1 || rc.entropy_points < 2 || rc.fig4_alpha_steps < 2 || rc.oracle_dim < 2)
	{
		throw InputError("entropy grid sizes out of range");
	}
	if(!(rc.fig4_alpha_max >= 0.0) || rc.fig4_alpha_max > default_alpha_cap)
	{
		throw InputError("fig4_alpha_max must lie in [0, 6]");
	}

	rc.classical_x0 = kv.get("classical_x0_m", rc.classical_x0);
	rc.classical_nu_ratio = kv.get("classical_nu_ratio", rc.classical_nu_ratio);
	rc.classical_periods = kv.get("classical_periods", rc.classical_periods);
	rc.classical_samples = kv.get_count("classical_samples", rc.classical_samples);
	rc.classical_rel_tol = kv.get("classical_rel_tol", rc.classical_rel_tol);
	rc.classical_drift_rel_tol = kv.get("classical_drift_rel_tol", rc.classical_drift_rel_tol);
	rc.classical_Q1 = kv.get("classical_Q1_C", rc.classical_Q1);
	rc.classical_P1 = kv.get("classical_P1_Wb", rc.classical_P1);
	rc.classical_Q2 = kv.get("classical_Q2_C", rc.classical_Q2);
	rc.classical_P2 = kv.get("classical_P2_Wb", rc.classical_P2);
	rc.classical_v_ct = kv.get("classical_v_ct_V", rc.classical_v_ct);
	if(!(rc.classical_nu_ratio > 0.0) || !(rc.classical_periods > 0.0) || !(rc.classical_rel_tol > 0.0)
	   || !(rc.classical_drift_rel_tol > 0.0))
	{
		throw InputError("classical drive ratio, periods and tolerance must be > 0");
	}

	auto& t = rc.tol;
	const auto positive = [&](const char* key, double& field) {
		field = kv.get(key, field);
		if(!(field > 0.0))
		{
			throw InputError(std::string("tolerance '") + key + "' must be > 0");
		}
	};
	positive("tol_ratio", t.ratio);
	positive("tol_current_residual", t.current_residual);
	positive("tol_elimination", t.elimination);
	positive("tol_elimination_order", t.elimination_order);
	positive("tol_entropy_symmetry", t.entropy_symmetry);
	positive("tol_entropy_endpoint", t.entropy_endpoint);
	positive("tol_tail", t.tail);
	positive("tol_entropy_oracle", t.entropy_oracle);
	positive("tol_cat_fidelity", t.cat_fidelity);
	positive("tol_separability", t.separability);
	positive("tol_spectral", t.spectral);
	positive("tol_energy_drift", t.energy_drift);

	rc.verify_theta_scale = kv.get("verify_theta_scale", 1.0);
	if(!(rc.verify_theta_scale > 0.0))
	{
		throw InputError("verify_theta_scale must be > 0");
	}
	return rc;
}

} // namespace nems::cli
