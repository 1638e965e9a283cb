#pragma once

#include "run_config.hpp"

#include "json.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

namespace nems::cli
{

using json = nlohmann::ordered_json;

inline constexpr int exit_ok = 0;
inline constexpr int exit_verification_failed = 1;
inline constexpr int exit_input_error = 2;

struct CheckResult
{
	std::string name;
	double residual = 0.0;
	double tolerance = 0.0;
	bool passed = false;
	std::string detail;
};

inline CheckResult make_check(std::string name, double residual, double tolerance, std::string detail = {})
{
	// NaN residuals fail
	return {std::move(name), residual, tolerance, residual <= tolerance, std::move(detail)};
}

inline json to_json(const CheckResult& c)
{
	return {{"name", c.name}, {"residual", c.residual}, {"tolerance", c.tolerance}, {"passed", c.passed},
	        {"detail", c.detail}};
}

inline std::vector<double> linspace(double a, double b, std::size_t n)
{
	std::vector<double> v(n);
	for(std::size_t i = 0; i < n; ++i)
	{
		v[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
	}
	// pin the endpoint exactly
	if(n > 1)
	{
		v.back() = b;
	}
	return v;
}

inline void write_json(const std::filesystem::path& path, const json& j)
{
	write_file_atomic(path, j.dump(2) + "\n");
}

// ---------------------------------------------------------------- readout

/// Normalised mean currents I/G over tau = (kappa1 + Gamma) t / 2 for n_b = 0..3,
/// with the residual of the integrated mean equation against the closed form.
struct CurrentCurves
{
	std::vector<double> tau;
	std::array<std::vector<double>, 4> normalized;
	std::array<std::vector<double>, 4> ode_residual; // |I_ode - I| / (G max(n_b, 1))
	double gain = 0.0;                                // A per phonon
};

inline CurrentCurves current_curves(const ReadoutParams& p, std::size_t points, double tau_max)
{
	CurrentCurves c;
	c.gain = stationary_gain(p);
	c.tau = linspace(0.0, tau_max, points);
	std::vector<double> times(points);
	for(std::size_t i = 0; i < points; ++i)
	{
		times[i] = 2.0 * c.tau[i] / p.total_damping();
	}
	for(std::size_t n = 0; n < 4; ++n)
	{
		const double nb = static_cast<double>(n);
		const auto a1 = integrate_mean_qsde(p, nb, times);
		auto& col = c.normalized[n];
		auto& res = c.ode_residual[n];
		col.resize(points);
		res.resize(points);
		for(std::size_t i = 0; i < points; ++i)
		{
			const double analytic = mean_photocurrent(times[i], nb, p);
			const double ode = photocurrent_from_amplitude(a1[i], p);
			col[i] = analytic / c.gain;
			res[i] = std::abs(ode - analytic) / (std::abs(c.gain) * std::max(nb, 1.0));
		}
	}
	return c;
}

inline std::vector<CheckResult> check_current(const RunConfig& rc)
{
	const auto p = rc.readout();
	const auto c = current_curves(p, rc.current_points, rc.current_tau_max);
	double ratio = 0.0;
	for(std::size_t n = 2; n < 4; ++n)
	{
		ratio = std::max(ratio, std::abs(c.normalized[n].back() / c.normalized[1].back() - static_cast<double>(n)));
	}
	double zero = 0.0;
	double ode = 0.0;
	for(std::size_t n = 0; n < 4; ++n)
	{
		for(std::size_t i = 0; i < c.tau.size(); ++i)
		{
			ode = std::max(ode, c.ode_residual[n][i]);
		}
	}
	for(double v : c.normalized[0])
	{
		zero = std::max(zero, std::abs(v));
	}
	return {
		make_check("current_stationary_ratio", ratio, rc.tol.ratio, "max |I(n)/I(1) - n| for n = 2, 3 at tau_max"),
		make_check("current_zero_phonons", zero, rc.tol.ratio, "max |I/G| for n_b = 0"),
		make_check("current_ode_vs_closed_form", ode, rc.tol.current_residual,
		           std::to_string(c.tau.size()) + " points, relative to G n_b"),
	};
}

/// Relative error of the eliminated stationary signal against the two-mode
/// mean dynamics run to stationarity, at kappa1 = kappa2 = 1 and alpha2 = 10.
inline double elimination_error(double theta0_over_kappa2, double theta_ratio)
{
	ReadoutParams p;
	p.kappa1 = 1.0;
	p.kappa2 = 1.0;
	p.theta0 = theta0_over_kappa2;
	p.theta = theta_ratio * theta0_over_kappa2;
	p.F = cplx{0.0, 5.0}; // alpha2 = 10
	const double n_b = 1.0;
	const std::array<double, 1> horizon{100.0 / p.kappa1};
	const auto full = full_two_mode_mean_dynamics(p, n_b, horizon);
	const cplx elim = eliminated_stationary_amplitude(n_b, p);
	return std::abs(full.back().signal - elim) / std::abs(elim);
}

inline std::vector<CheckResult> check_elimination(double theta_ratio, const Tolerances& tol)
{
	const std::array<double, 3> ratios{1e-1, 1e-2, 1e-3};
	std::array<double, 3> err{};
	for(std::size_t i = 0; i < ratios.size(); ++i)
	{
		err[i] = elimination_error(ratios[i], theta_ratio);
	}
	// least-squares slope of log(err) against log(ratio)
	double mx = 0.0, my = 0.0;
	for(std::size_t i = 0; i < 3; ++i)
	{
		mx += std::log10(ratios[i]) / 3.0;
		my += std::log10(err[i]) / 3.0;
	}
	double sxy = 0.0, sxx = 0.0;
	for(std::size_t i = 0; i < 3; ++i)
	{
		sxy += (std::log10(ratios[i]) - mx) * (std::log10(err[i]) - my);
		sxx += (std::log10(ratios[i]) - mx) * (std::log10(ratios[i]) - mx);
	}
	const double slope = sxy / sxx;
	char detail[160];
	std::snprintf(detail, sizeof detail, "errors %.3e, %.3e, %.3e at theta0/kappa2 = 1e-1, 1e-2, 1e-3", err[0], err[1],
	              err[2]);
	return {
		make_check("elimination_error_at_1e-2", err[1], tol.elimination, detail),
		// residual is the fitted log-log slope, tolerance its minimum
		CheckResult{"elimination_convergence_order", slope, tol.elimination_order, slope >= tol.elimination_order,
		            "fitted slope of log error against log(theta0/kappa2), must be at least the tolerance"},
	};
}

// ---------------------------------------------------------------- entanglement

struct EntropyGrid
{
	std::vector<double> theta_t;
	std::vector<EntropyReport> reports;

	[[nodiscard]] double max_tail_bound() const
	{
		double m = 0.0;
		for(const auto& r : reports)
		{
			m = std::max(m, r.tail_bound);
		}
		return m;
	}
};

inline EntropyGrid entropy_grid(const CoherentTriple& triple, std::size_t points, std::size_t terms)
{
	EntropyGrid g;
	g.theta_t = linspace(0.0, 2.0 * std::numbers::pi, points);
	g.reports.reserve(points);
	for(double th : g.theta_t)
	{
		g.reports.push_back(linear_entropies(triple, th, terms));
	}
	return g;
}

inline std::vector<CheckResult> check_entropy_grid(const RunConfig& rc)
{
	const auto g = entropy_grid(rc.triple, rc.entropy_points, rc.entropy_terms);
	std::vector<CheckResult> out;
	if(rc.triple.beta == rc.triple.gamma)
	{
		double sym = 0.0;
		for(const auto& r : g.reports)
		{
			sym = std::max(sym, std::abs(r.E_1_N2 - r.E_2_N1));
		}
		out.push_back(make_check("entropy_symmetry_beta_eq_gamma", sym, rc.tol.entropy_symmetry,
		                         "max |E_1|N2 - E_2|N1|"));
	}
	double ends = 0.0;
	for(const auto* r : {&g.reports.front(), &g.reports.back()})
	{
		ends = std::max({ends, r->E_N_12, r->E_1_N2, r->E_2_N1});
	}
	out.push_back(make_check("entropy_vanishes_at_0_and_2pi", ends, rc.tol.entropy_endpoint));
	out.push_back(make_check("entropy_tail_bound", g.max_tail_bound(), rc.tol.tail,
	                         std::to_string(g.reports.front().terms) + " terms"));
	return out;
}

struct OraclePoint
{
	CoherentTriple triple;
	double theta_t = 0.0;
};

/// Deterministic grid of 24 points with |amplitude| <= 2, plus the symmetric
/// reference point alpha = beta = gamma = 2 at theta t = pi/2.
inline std::vector<OraclePoint> oracle_grid()
{
	const std::array<cplx, 6> amps{cplx{2.0, 0.0},  cplx{1.0, 1.0}, cplx{0.5, 0.0},
	                               cplx{-1.5, 0.5}, cplx{0.0, 2.0}, cplx{1.2, -1.6}};
	const std::array<double, 8> thetas{0.3, std::numbers::pi / 2.0, 1.1, std::numbers::pi, 2.5, 4.0, 5.5, 5.9};
	std::vector<OraclePoint> pts;
	pts.push_back({{2.0, 2.0, 2.0}, std::numbers::pi / 2.0});
	for(std::size_t k = 0; k < 24; ++k)
	{
		pts.push_back({{amps[k % 6], amps[(k / 2 + 1) % 6], amps[(k / 3 + 3) % 6]}, thetas[k % 8]});
	}
	return pts;
}

/// Analytic entropies at theta_scale * theta t against the oracle at theta t.
inline CheckResult check_oracle_grid(std::size_t dim, double theta_scale, double tolerance)
{
	const OracleDims dims{dim, dim, dim};
	const BeamSplitterOracle oracle(dims, OracleOptions{});
	double worst = 0.0;
	const auto pts = oracle_grid();
	for(const auto& pt : pts)
	{
		const auto analytic = linear_entropies(conditioned_state(pt.triple, theta_scale * pt.theta_t, dims.nems));
		const auto brute = oracle.entropies(oracle.evolve(pt.triple, pt.theta_t));
		worst = std::max(worst, compare_entropies(analytic, brute).max());
	}
	return make_check("entropy_oracle_grid", worst, tolerance,
	                  std::to_string(pts.size()) + " points at dims " + std::to_string(dim) + "^3");
}

inline std::vector<CheckResult> check_cat(const RunConfig& rc)
{
	const auto r = cat_state_check(rc.triple, rc.entropy_terms);
	std::vector<CheckResult> out;
	out.push_back(make_check("cat_even_fidelity", std::abs(1.0 - r.fidelity_even), rc.tol.cat_fidelity));
	if(r.fidelity_odd)
	{
		out.push_back(make_check("cat_odd_fidelity", std::abs(1.0 - *r.fidelity_odd), rc.tol.cat_fidelity));
	}
	const auto s = separability_check_12(rc.triple, std::numbers::pi);
	out.push_back(make_check("separable_mixture_at_pi", s.max_deviation, rc.tol.separability,
	                         "entrywise, dims " + std::to_string(s.dims.tlr1) + "x" + std::to_string(s.dims.tlr2)));
	return out;
}

// ---------------------------------------------------------------- classical

inline ClassicalCircuitConfig classical_config(const RunConfig& rc, bool driven, double periods, std::size_t samples)
{
	const auto eff = rc.effective_params();
	ClassicalCircuitConfig cfg;
	cfg.params = rc.circuit;
	const double omega = eff.omega_tilde1;
	if(driven)
	{
		const double x0 = rc.x0();
		const double nu = rc.classical_nu_ratio * omega;
		cfg.x_drive = [x0, nu](double t) { return x0 * std::cos(nu * t); };
		const double v = rc.classical_v_ct;
		cfg.v_ct = [v](double) { return v; };
	}
	cfg.Q1 = rc.classical_Q1;
	cfg.P1 = rc.classical_P1;
	cfg.Q2 = rc.classical_Q2;
	cfg.P2 = rc.classical_P2;
	cfg.t_end = periods * 2.0 * std::numbers::pi / omega;
	cfg.samples = samples;
	cfg.rel_tol = rc.classical_rel_tol;
	return cfg;
}

struct ClassicalRun
{
	std::vector<CircuitSample> samples;
	double omega_tilde = 0.0;
	double peak = 0.0;
	double relative_error = 0.0;
};

inline ClassicalRun classical_spectrum(const RunConfig& rc)
{
	const auto cfg = classical_config(rc, true, rc.classical_periods, rc.classical_samples);
	ClassicalRun r;
	r.samples = simulate_classical_circuit(cfg);
	r.omega_tilde = rc.effective_params().omega_tilde1;
	std::vector<double> q(r.samples.size());
	for(std::size_t i = 0; i < q.size(); ++i)
	{
		q[i] = r.samples[i].Q1;
	}
	const double dt = (cfg.t_end - cfg.t_begin) / static_cast<double>(cfg.samples - 1);
	r.peak = estimate_dominant_frequency(q, dt);
	r.relative_error = std::abs(r.peak - r.omega_tilde) / r.omega_tilde;
	return r;
}

/// Largest relative energy excursion over 1000 periods with x = 0.
inline double classical_energy_drift(const RunConfig& rc)
{
	auto cfg = classical_config(rc, false, 1000.0, 1001);
	cfg.rel_tol = rc.classical_drift_rel_tol;
	const auto traj = simulate_classical_circuit(cfg);
	const double e0 = circuit_energy(cfg, traj.front());
	double worst = 0.0;
	for(const auto& s : traj)
	{
		worst = std::max(worst, std::abs(circuit_energy(cfg, s) - e0) / e0);
	}
	return worst;
}

inline std::vector<CheckResult> check_classical(const RunConfig& rc)
{
	const auto r = classical_spectrum(rc);
	return {
		make_check("classical_spectral_peak", r.relative_error, rc.tol.spectral,
		           "peak " + format_number(r.peak) + " rad/s vs omega_tilde " + format_number(r.omega_tilde)),
		make_check("classical_energy_drift", classical_energy_drift(rc), rc.tol.energy_drift, "1000 periods, x = 0"),
	};
}

// ---------------------------------------------------------------- commands

inline json params_json(const RunConfig& rc)
{
	const auto e = rc.effective_params();
	const auto p = rc.readout();
	const auto reg = regime(p);
	return {
		{"Ceq_F", e.Ceq},
		{"Ctilde1_F", e.Ctilde1},
		{"Ctilde2_F", e.Ctilde2},
		{"omega1_rad_s", e.omega1},
		{"omega2_rad_s", e.omega2},
		{"omega_tilde1_rad_s", e.omega_tilde1},
		{"omega_tilde2_rad_s", e.omega_tilde2},
		{"omega_avg1_rad_s", e.omega_avg1},
		{"omega_avg2_rad_s", e.omega_avg2},
		{"detuning", e.detuning()},
		{"theta0_rad_s", e.theta0},
		{"theta0_exact_rad_s", e.theta0_exact},
		{"theta_rad_s", e.theta},
		{"theta_over_theta0", e.theta_ratio()},
		{"x_rms_sq_over_d_sq", e.x_rms_sq_over_d_sq},
		{"mean_phonon_number", e.mean_phonon_number},
		{"kappa1_rad_s", rc.kappa1()},
		{"kappa2_rad_s", rc.kappa2()},
		{"Gamma_rad_s", p.Gamma() * rc.kappa2()},
		{"theta0_over_kappa2", reg.theta0_over_kappa2},
		{"theta_over_kappa2", reg.theta_over_kappa2},
		{"weak_coupling_ok", reg.ok()},
	};
}

inline void warn_regime(const ReadoutParams& p, std::ostream& log)
{
	const auto r = check_regime(p);
	if(!r.ok())
	{
		log << "warning: outside weak-coupling regime (theta0/kappa2 = " << r.theta0_over_kappa2
		    << ", |theta|/kappa2 = " << r.theta_over_kappa2 << ")\n";
	}
}

inline int cmd_params(const RunConfig& rc, const std::filesystem::path& out, std::ostream& log)
{
	warn_regime(rc.readout(), log);
	const auto j = params_json(rc);
	for(const auto& [key, value] : j.items())
	{
		char line[128];
		if(value.is_number())
		{
			std::snprintf(line, sizeof line, "%-22s %s\n", key.c_str(), format_number(value.get<double>()).c_str());
		}
		else
		{
			std::snprintf(line, sizeof line, "%-22s %s\n", key.c_str(), value.dump().c_str());
		}
		log << line;
	}
	write_json(out / "params.json", j);
	return exit_ok;
}

inline int cmd_current(const RunConfig& rc, const std::filesystem::path& out, std::ostream& log)
{
	const auto p = rc.readout();
	warn_regime(p, log);
	const auto c = current_curves(p, rc.current_points, rc.current_tau_max);
	// t is the normalised time (kappa1 + Gamma) t / 2, currents are I / G
	CsvTable t({"t", "I_nb1", "I_nb2", "I_nb3"});
	CsvTable check({"t", "I_nb0", "ode_residual_nb1", "ode_residual_nb2", "ode_residual_nb3"});
	for(std::size_t i = 0; i < c.tau.size(); ++i)
	{
		t.add_row({c.tau[i], c.normalized[1][i], c.normalized[2][i], c.normalized[3][i]});
		check.add_row({c.tau[i], c.normalized[0][i], c.ode_residual[1][i], c.ode_residual[2][i], c.ode_residual[3][i]});
	}
	write_file_atomic(out / "current.csv", t.str());
	write_file_atomic(out / "current_check.csv", check.str());
	log << "gain G = " << format_number(c.gain) << " A per phonon\n";
	return exit_ok;
}

inline int cmd_entropy(const RunConfig& rc, const std::filesystem::path& out, std::ostream& log)
{
	const auto write_grid = [&](const std::filesystem::path& path, const EntropyGrid& g) {
		CsvTable t({"theta_t", "E_N12", "E_1N2", "E_2N1"});
		for(std::size_t i = 0; i < g.theta_t.size(); ++i)
		{
			const auto& r = g.reports[i];
			t.add_row({g.theta_t[i], r.E_N_12, r.E_1_N2, r.E_2_N1});
		}
		write_file_atomic(path, t.str());
	};

	const auto main = entropy_grid(rc.triple, rc.entropy_points, rc.entropy_terms);
	write_grid(out / "fig5.csv", main);

	const std::array<std::pair<cplx, cplx>, 4> insets{{
		{{2.0, 0.0}, {2.0, 0.0}},
		{{3.0, 0.0}, {4.0, 0.0}},
		{{1.0, 2.0}, {1.0, 2.0}},
		{{3.0, 4.0}, {1.0, 2.0}},
	}};
	double tail = main.max_tail_bound();
	for(std::size_t k = 0; k < insets.size(); ++k)
	{
		const auto g = entropy_grid({2.0, insets[k].first, insets[k].second}, rc.entropy_points, rc.entropy_terms);
		tail = std::max(tail, g.max_tail_bound());
		write_grid(out / ("fig5_inset_" + std::to_string(k + 1) + ".csv"), g);
	}

	CsvTable fig4({"theta_t", "abs_alpha", "E_N12"});
	for(double a : linspace(0.0, rc.fig4_alpha_max, rc.fig4_alpha_steps))
	{
		const auto g = entropy_grid({a, a, a}, rc.entropy_points, rc.entropy_terms);
		tail = std::max(tail, g.max_tail_bound());
		for(std::size_t i = 0; i < g.theta_t.size(); ++i)
		{
			fig4.add_row({g.theta_t[i], a, g.reports[i].E_N_12});
		}
	}
	write_file_atomic(out / "fig4.csv", fig4.str());
	log << "largest truncation tail bound " << format_number(tail) << "\n";
	return exit_ok;
}

inline int cmd_cat(const RunConfig& rc, const std::filesystem::path& out, std::ostream& log)
{
	const auto r = cat_state_check(rc.triple, rc.entropy_terms);
	const auto s = separability_check_12(rc.triple, std::numbers::pi);
	json j = {
		{"fidelity_even", r.fidelity_even},
		{"fidelity_odd", r.fidelity_odd ? json(*r.fidelity_odd) : json(nullptr)},
		{"probability_plus", r.probability_plus},
		{"probability_minus", r.probability_minus},
		{"global_norm", r.global_norm},
		{"fidelity_reassembled", r.fidelity_reassembled},
		{"dims", {r.dims.nems, r.dims.tlr1, r.dims.tlr2}},
		{"separability_max_deviation", s.max_deviation},
		{"separability_mixture_trace", s.mixture_trace},
	};
	write_json(out / "cat.json", j);
	log << "even cat fidelity " << format_number(r.fidelity_even) << "\n";
	if(r.fidelity_odd)
	{
		log << "odd cat fidelity  " << format_number(*r.fidelity_odd) << "\n";
	}
	return exit_ok;
}

inline int cmd_classical(const RunConfig& rc, const std::filesystem::path& out, std::ostream& log)
{
	const auto r = classical_spectrum(rc);
	const double drift = classical_energy_drift(rc);
	write_file_atomic(out / "classical.csv", trajectory_table(r.samples).str());
	write_json(out / "classical.json", {{"omega_tilde_rad_s", r.omega_tilde},
	                                    {"peak_rad_s", r.peak},
	                                    {"relative_error", r.relative_error},
	                                    {"energy_drift_1000_periods", drift}});
	log << "Q1 spectral peak " << format_number(r.peak) << " rad/s, relative to omega_tilde "
	    << format_number(r.relative_error) << "\n";
	return exit_ok;
}

inline std::vector<CheckResult> run_all_checks(const RunConfig& rc)
{
	std::vector<CheckResult> all;
	const auto append = [&](std::vector<CheckResult> v) { all.insert(all.end(), v.begin(), v.end()); };
	append(check_current(rc));
	append(check_elimination(rc.effective_params().theta_ratio(), rc.tol));
	append(check_entropy_grid(rc));
	all.push_back(check_oracle_grid(rc.oracle_dim, rc.verify_theta_scale, rc.tol.entropy_oracle));
	append(check_cat(rc));
	append(check_classical(rc));
	return all;
}

inline int cmd_verify(const RunConfig& rc, const std::filesystem::path& out, std::ostream& log)
{
	warn_regime(rc.readout(), log);
	const auto checks = run_all_checks(rc);
	json list = json::array();
	bool ok = true;
	for(const auto& c : checks)
	{
		ok = ok && c.passed;
		list.push_back(to_json(c));
		char line[256];
		std::snprintf(line, sizeof line, "%-4s %-34s residual %.3e  tol %.3e\n", c.passed ? "ok" : "FAIL",
		              c.name.c_str(), c.residual, c.tolerance);
		log << line;
	}
	write_json(out / "verify.json", {{"passed", ok}, {"checks", list}});
	if(!ok)
	{
		log << "verification failed:";
		for(const auto& c : checks)
		{
			if(!c.passed)
			{
				log << " " << c.name;
			}
		}
		log << "\n";
	}
	return ok ? exit_ok : exit_verification_failed;
}

} // namespace nems::cli
