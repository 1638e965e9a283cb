#pragma once

#include "nems/circuit_params.hpp"
#include "nems/error.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace nems
{

/// One sample of the Kirchhoff dynamics: charges (C) and fluxes (Wb).
struct CircuitSample
{
	double t = 0.0;
	double Q1 = 0.0;
	double P1 = 0.0;
	double Q2 = 0.0;
	double P2 = 0.0;
};

/// Classical two-resonator circuit driven by a prescribed NEMS displacement.
///
/// V_CT is exogenous. It defaults to zero; no attempt is made to close it
/// self-consistently from the charges.
struct ClassicalCircuitConfig
{
	PhysicalCircuitParams params;
	std::function<double(double)> x_drive = [](double) { return 0.0; }; // m
	std::function<double(double)> v_ct = [](double) { return 0.0; };    // V
	double Q1 = 0.0;
	double P1 = 0.0;
	double Q2 = 0.0;
	double P2 = 0.0;
	double t_begin = 0.0;
	double t_end = 0.0;
	std::size_t samples = 1024; // uniformly spaced, including both endpoints
	double rel_tol = 1e-10;
	double abs_tol = 1e-13; // relative to the internal charge scale
	std::size_t max_steps = 50'000'000;
};

namespace detail
{

using CircuitState = std::array<double, 4>;

// Dimensionless form: tau = w t, q = Q/Qs, p = P/(L w Qs).
struct ScaledCircuit
{
	const ClassicalCircuitConfig* cfg;
	double w;
	double Qs;

	void operator()(const CircuitState& s, CircuitState& ds, double tau) const
	{
		const auto& p = cfg->params;
		const double t = tau / w;
		const double x = cfg->x_drive(t);
		if(!(std::abs(x) < p.d))
		{
			throw InputError("short-circuit guard: |x(t)| >= d at t = " + std::to_string(t));
		}
		const double v = cfg->v_ct(t);
		const double k = (p.d * p.d - x * x) / (2.0 * p.d * p.eps0 * p.A);
		const double w2 = w * w;
		ds[0] = s[1];
		ds[1] = -((1.0 / p.C1 + k) * s[0] + k * s[2]) / (p.L1 * w2)
		        - (p.d - x) / (2.0 * p.d) * v / (p.L1 * w2 * Qs);
		ds[2] = s[3];
		ds[3] = -((1.0 / p.C2 + k) * s[2] + k * s[0]) / (p.L2 * w2)
		        + (p.d + x) / (2.0 * p.d) * v / (p.L2 * w2 * Qs);
	}
};

} // namespace detail

/// Energy of the circuit Hamiltonian at a sample (J).
inline double circuit_energy(const ClassicalCircuitConfig& cfg, const CircuitSample& s)
{
	const auto& p = cfg.params;
	const double x = cfg.x_drive(s.t);
	const double v = cfg.v_ct(s.t);
	const double k = (p.d * p.d - x * x) / (2.0 * p.d * p.eps0 * p.A);
	return s.P1 * s.P1 / (2.0 * p.L1) + s.P2 * s.P2 / (2.0 * p.L2)
	       + (1.0 / p.C1 + k) * s.Q1 * s.Q1 / 2.0 + (1.0 / p.C2 + k) * s.Q2 * s.Q2 / 2.0 + k * s.Q1 * s.Q2
	       + (p.d - x) / (2.0 * p.d) * v * s.Q1 - (p.d + x) / (2.0 * p.d) * v * s.Q2;
}

/// Integrates the four Kirchhoff equations with an adaptive Runge-Kutta-Fehlberg
/// 7(8) stepper, sampling on a uniform grid.
inline std::vector<CircuitSample> simulate_classical_circuit(const ClassicalCircuitConfig& cfg)
{
	cfg.params.validate();
	if(!(cfg.t_end > cfg.t_begin))
	{
		throw InputError("classical circuit: t_end must exceed t_begin");
	}
	if(cfg.samples < 2)
	{
		throw InputError("classical circuit: need at least 2 samples");
	}
	if(!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0))
	{
		throw InputError("classical circuit: tolerances must be positive");
	}

	const auto& p = cfg.params;
	const double dt = (cfg.t_end - cfg.t_begin) / static_cast<double>(cfg.samples - 1);
	for(std::size_t i = 0; i < cfg.samples; ++i)
	{
		const double t = cfg.t_begin + dt * static_cast<double>(i);
		if(!(std::abs(cfg.x_drive(t)) < p.d))
		{
			throw InputError("short-circuit guard: max |x(t)| must stay below d (violated at t = "
			                 + std::to_string(t) + ")");
		}
	}

	const auto eff = effective_params(p);
	const double w = std::max(eff.omega_tilde1, eff.omega_tilde2);

	double Qs = std::max({std::abs(cfg.Q1), std::abs(cfg.Q2), std::abs(cfg.P1) / (p.L1 * w),
	                      std::abs(cfg.P2) / (p.L2 * w)});
	if(Qs == 0.0)
	{
		double vmax = 0.0;
		for(std::size_t i = 0; i < cfg.samples; ++i)
		{
			vmax = std::max(vmax, std::abs(cfg.v_ct(cfg.t_begin + dt * static_cast<double>(i))));
		}
		Qs = vmax > 0.0 ? eff.Ceq * vmax : 1.0;
	}

	detail::ScaledCircuit rhs{&cfg, w, Qs};
	detail::CircuitState s{cfg.Q1 / Qs, cfg.P1 / (p.L1 * w * Qs), cfg.Q2 / Qs, cfg.P2 / (p.L2 * w * Qs)};

	std::vector<CircuitSample> out;
	out.reserve(cfg.samples);
	auto record = [&](const detail::CircuitState& st, double tau) {
		out.push_back({tau / w, st[0] * Qs, st[1] * p.L1 * w * Qs, st[2] * Qs, st[3] * p.L2 * w * Qs});
	};

	namespace odeint = boost::numeric::odeint;
	using stepper_t = odeint::runge_kutta_fehlberg78<detail::CircuitState>;
	auto stepper = odeint::make_controlled<stepper_t>(cfg.abs_tol, cfg.rel_tol);

	const double tau_dt = dt * w;
	double tau = cfg.t_begin * w;
	double h = std::min(tau_dt, 0.05);
	record(s, tau);
	try
	{
		std::size_t steps = 0;
		for(std::size_t i = 1; i < cfg.samples; ++i)
		{
			const double tau_next = (cfg.t_begin + dt * static_cast<double>(i)) * w;
			while(tau < tau_next)
			{
				double h_try = std::min(h, tau_next - tau);
				const bool clipped = h_try < h;
				if(stepper.try_step(std::ref(rhs), s, tau, h_try) == odeint::fail)
				{
					h = h_try;
					if(h < 1e-14 * std::max(1.0, std::abs(tau)))
					{
						throw IntegrationError("classical circuit: step size underflow at t = "
						                       + std::to_string(tau / w));
					}
					continue;
				}
				if(!clipped)
				{
					h = h_try;
				}
				if(++steps > cfg.max_steps)
				{
					throw IntegrationError("classical circuit: step budget exhausted at t = "
					                       + std::to_string(tau / w));
				}
			}
			tau = tau_next;
			record(s, tau);
		}
	}
	catch(const odeint::odeint_error& e)
	{
		throw IntegrationError(std::string("classical circuit: ") + e.what());
	}
	return out;
}

} // namespace nems
