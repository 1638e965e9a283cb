#pragma once

#include "nems/circuit_params.hpp"
#include "nems/error.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace nems
{

using cplx = std::complex<double>;

enum class RegimeMode
{
	permissive,
	strict,
};

inline constexpr double regime_limit = 0.1;

/// Drive and damping of the readout. Rates share one unit (see UnitSystem);
/// `omega_tilde` (rad/s), `L` (H) and `hbar` (J s) only enter the conversion
/// to amperes.
struct ReadoutParams
{
	cplx F{0.0, 0.0};
	double kappa1 = 1.0;
	double kappa2 = 1.0;
	double theta0 = 0.0;
	double theta = 0.0;
	double omega_tilde = 1.0;
	double L = 1.0;
	double hbar = codata::reduced_planck;
	RegimeMode mode = RegimeMode::permissive;

	[[nodiscard]] cplx alpha2() const { return cplx{0.0, -2.0} * F / kappa2; }
	[[nodiscard]] double Gamma() const { return 2.0 * theta0 * theta0 / kappa2; }
	[[nodiscard]] double total_damping() const { return Gamma() + kappa1; }

	/// sqrt(2 hbar omega_tilde / L): amperes per unit quadrature amplitude.
	[[nodiscard]] double current_scale() const { return std::sqrt(2.0 * hbar * omega_tilde / L); }

	void validate() const
	{
		if(!(kappa2 > 0.0))
		{
			throw InputError("kappa2 must be > 0");
		}
		if(!(kappa1 > 0.0))
		{
			throw InputError("kappa1 must be > 0");
		}
		if(!(omega_tilde > 0.0) || !(L > 0.0) || !(hbar > 0.0))
		{
			throw InputError("omega_tilde, L and hbar must be > 0");
		}
		if(!std::isfinite(F.real()) || !std::isfinite(F.imag()) || !std::isfinite(theta0) || !std::isfinite(theta))
		{
			throw InputError("readout parameters must be finite");
		}
	}
};

/// Builds readout parameters from SI inputs, expressing every rate in units of
/// `units.rate_unit`.
inline ReadoutParams make_readout_params(const EffectiveParams& eff, const PhysicalCircuitParams& phys, cplx F_si,
                                         double kappa1_si, double kappa2_si, const UnitSystem& units,
                                         RegimeMode mode = RegimeMode::permissive)
{
	ReadoutParams p;
	p.F = F_si / units.rate_unit;
	p.kappa1 = units.to_dimensionless(kappa1_si);
	p.kappa2 = units.to_dimensionless(kappa2_si);
	p.theta0 = units.to_dimensionless(eff.theta0);
	p.theta = units.to_dimensionless(eff.theta);
	p.omega_tilde = eff.omega_tilde1;
	p.L = phys.L1;
	p.hbar = phys.hbar;
	p.mode = mode;
	p.validate();
	return p;
}

struct RegimeReport
{
	double theta0_over_kappa2 = 0.0;
	double theta_over_kappa2 = 0.0;

	[[nodiscard]] bool ok() const { return theta0_over_kappa2 < regime_limit && theta_over_kappa2 < regime_limit; }
};

inline RegimeReport regime(const ReadoutParams& p)
{
	return {std::abs(p.theta0) / p.kappa2, std::abs(p.theta) / p.kappa2};
}

/// Throws RegimeError in strict mode when theta0/kappa2 or |theta|/kappa2
/// reaches 0.1.
inline RegimeReport check_regime(const ReadoutParams& p)
{
	p.validate();
	const auto r = regime(p);
	if(p.mode == RegimeMode::strict && !r.ok())
	{
		const double worst = std::max(r.theta0_over_kappa2, r.theta_over_kappa2);
		throw RegimeError("weak-coupling regime violated: max(theta0, |theta|)/kappa2 = " + std::to_string(worst)
		                      + " >= " + std::to_string(regime_limit),
		                  worst);
	}
	return r;
}

inline cplx steady_alpha2(cplx F, double kappa2)
{
	if(!(kappa2 > 0.0))
	{
		throw InputError("kappa2 must be > 0");
	}
	return cplx{0.0, -2.0} * F / kappa2;
}

/// Current in the quadrature referenced to the drive phase:
/// I = sqrt(2 hbar omega_tilde / L) Im(e^{-i arg alpha2} a1). For the usual
/// purely imaginary drive (alpha2 > 0) this is i sqrt(hbar omega_tilde/2L) <a1^dagger - a1>.
inline double photocurrent_from_amplitude(cplx a1, const ReadoutParams& p)
{
	const cplx a2 = p.alpha2();
	const cplx ref = std::abs(a2) > 0.0 ? std::conj(a2) / std::abs(a2) : cplx{1.0, 0.0};
	return p.current_scale() * (ref * a1).imag();
}

/// Stationary gain G: current per phonon, positive for theta < 0.
inline double stationary_gain(const ReadoutParams& p)
{
	check_regime(p);
	return -std::abs(p.alpha2()) * p.theta * std::sqrt(8.0 * p.hbar * p.omega_tilde / p.L) / p.total_damping();
}

/// Closed-form mean photocurrent (A) after time t (in inverse rate units),
/// assuming <a1(0)> = 0.
inline double mean_photocurrent(double t, double mean_phonon_number, const ReadoutParams& p)
{
	if(!(t >= 0.0))
	{
		throw InputError("t must be >= 0");
	}
	if(!(mean_phonon_number >= 0.0))
	{
		throw InputError("mean phonon number must be >= 0");
	}
	const double G = stationary_gain(p);
	return G * mean_phonon_number * -std::expm1(-p.total_damping() * t / 2.0);
}

/// Closed-form <a1>(t) of the eliminated model for a given initial amplitude.
inline cplx eliminated_amplitude(double t, double mean_phonon_number, const ReadoutParams& p, cplx a1_0 = 0.0)
{
	const double rate = p.total_damping() / 2.0;
	const cplx stationary = cplx{0.0, -2.0} * p.alpha2() * p.theta * mean_phonon_number / p.total_damping();
	return a1_0 * std::exp(-rate * t) + stationary * -std::expm1(-rate * t);
}

inline cplx eliminated_stationary_amplitude(double mean_phonon_number, const ReadoutParams& p)
{
	return cplx{0.0, -2.0} * p.alpha2() * p.theta * mean_phonon_number / p.total_damping();
}

struct OdeTolerance
{
	double rel = 1e-12;
	double abs = 1e-15; // relative to the problem's natural amplitude scale
};

namespace detail
{

// Integrates a real linear ODE system sampled at increasing times with a
// controlled Runge-Kutta-Fehlberg 7(8) stepper.
template <std::size_t N, typename Rhs>
std::vector<std::array<double, N>> integrate_sampled(Rhs rhs, std::array<double, N> x, std::span<const double> times,
                                                     const OdeTolerance& tol, double h0)
{
	namespace odeint = boost::numeric::odeint;
	using state_t = std::array<double, N>;
	if(times.empty())
	{
		return {};
	}
	for(std::size_t i = 1; i < times.size(); ++i)
	{
		if(!(times[i] >= times[i - 1]))
		{
			throw InputError("sample times must be non-decreasing");
		}
	}
	if(!(times[0] >= 0.0))
	{
		throw InputError("sample times must be >= 0");
	}
	auto stepper = odeint::make_controlled<odeint::runge_kutta_fehlberg78<state_t>>(tol.abs, tol.rel);
	std::vector<state_t> out;
	out.reserve(times.size());
	double t = 0.0;
	double h = h0;
	std::size_t steps = 0;
	try
	{
		for(double target : times)
		{
			while(t < target)
			{
				double h_try = std::min(h, target - t);
				const bool clipped = h_try < h;
				if(stepper.try_step(rhs, x, t, h_try) == odeint::fail)
				{
					h = h_try;
					if(h < 1e-15 * std::max(1.0, t))
					{
						throw IntegrationError("mean-field integration: step size underflow at t = " + std::to_string(t));
					}
					continue;
				}
				if(!clipped)
				{
					h = h_try;
				}
				if(++steps > 10'000'000)
				{
					throw IntegrationError("mean-field integration: step budget exhausted");
				}
			}
			t = target;
			out.push_back(x);
		}
	}
	catch(const odeint::odeint_error& e)
	{
		throw IntegrationError(std::string("mean-field integration: ") + e.what());
	}
	return out;
}

} // namespace detail

/// Integrates d<a1>/dt = -i theta alpha2 n_b - (kappa1 + Gamma)/2 <a1>, the
/// noise-averaged eliminated equation.
inline std::vector<cplx> integrate_mean_qsde(const ReadoutParams& p, double mean_phonon_number,
                                             std::span<const double> times, cplx a1_0 = 0.0,
                                             const OdeTolerance& tol = {})
{
	check_regime(p);
	const cplx forcing = cplx{0.0, -1.0} * p.theta * p.alpha2() * mean_phonon_number;
	const double rate = p.total_damping() / 2.0;
	// Work in units of the larger of |a1(0)| and the stationary amplitude.
	double scale = std::max(std::abs(a1_0), std::abs(forcing) / rate);
	if(scale == 0.0)
	{
		scale = 1.0;
	}
	const cplx f = forcing / scale;
	auto rhs = [&](const std::array<double, 2>& x, std::array<double, 2>& dx, double) {
		dx[0] = f.real() - rate * x[0];
		dx[1] = f.imag() - rate * x[1];
	};
	const auto raw = detail::integrate_sampled<2>(rhs, {a1_0.real() / scale, a1_0.imag() / scale}, times, tol,
	                                              0.01 / rate);
	std::vector<cplx> out;
	out.reserve(raw.size());
	for(const auto& x : raw)
	{
		out.emplace_back(x[0] * scale, x[1] * scale);
	}
	return out;
}

/// One sample of the un-eliminated two-mode mean dynamics. `signal` is the
/// phonon-conditioned part <a1>(n_b) - <a1>(0), integrated directly so it is
/// resolved even when theta n_b is many orders below theta0.
struct TwoModeSample
{
	double t = 0.0;
	cplx a1;
	cplx a2;
	cplx signal;
};

/// Mean of the coupled resonator equations with b^dagger b -> n_b, starting
/// from the given amplitudes (default vacuum).
///
/// Splits a = b + theta n_b s, where b solves the n_b = 0 problem and s the
/// exact linear sensitivity, both of order one.
inline std::vector<TwoModeSample> full_two_mode_mean_dynamics(const ReadoutParams& p, double mean_phonon_number,
                                                              std::span<const double> times, cplx a1_0 = 0.0,
                                                              cplx a2_0 = 0.0, const OdeTolerance& tol = {})
{
	check_regime(p);
	const double k1 = p.kappa1 / 2.0;
	const double k2 = p.kappa2 / 2.0;
	const double g0 = p.theta0;
	const double dg = p.theta * mean_phonon_number;
	const double g = g0 + dg;

	double scale = std::max({std::abs(a1_0), std::abs(a2_0), std::abs(p.alpha2())});
	if(scale == 0.0)
	{
		scale = 1.0;
	}
	const cplx F = p.F / scale;
	const cplx mi{0.0, -1.0};

	// x = [b1, b2, s1, s2] as interleaved (re, im).
	auto rhs = [&](const std::array<double, 8>& x, std::array<double, 8>& dx, double) {
		const cplx b1{x[0], x[1]};
		const cplx b2{x[2], x[3]};
		const cplx s1{x[4], x[5]};
		const cplx s2{x[6], x[7]};
		const cplx db1 = mi * g0 * b2 - k1 * b1;
		const cplx db2 = mi * g0 * b1 - k2 * b2 + mi * F;
		const cplx ds1 = mi * g * s2 + mi * b2 - k1 * s1;
		const cplx ds2 = mi * g * s1 + mi * b1 - k2 * s2;
		dx = {db1.real(), db1.imag(), db2.real(), db2.imag(), ds1.real(), ds1.imag(), ds2.real(), ds2.imag()};
	};
	const double fastest = std::max({k1, k2, std::abs(g)});
	const auto raw = detail::integrate_sampled<8>(
		rhs, {a1_0.real() / scale, a1_0.imag() / scale, a2_0.real() / scale, a2_0.imag() / scale, 0, 0, 0, 0},
		times, tol, 0.01 / fastest);

	std::vector<TwoModeSample> out;
	out.reserve(raw.size());
	for(std::size_t i = 0; i < raw.size(); ++i)
	{
		const auto& x = raw[i];
		const cplx b1{x[0], x[1]};
		const cplx b2{x[2], x[3]};
		const cplx s1{x[4], x[5]};
		const cplx s2{x[6], x[7]};
		out.push_back({times[i], scale * (b1 + dg * s1), scale * (b2 + dg * s2), scale * dg * s1});
	}
	return out;
}

/// Fixed point of the two-mode mean equations (linear solve), for reference.
struct TwoModeStationary
{
	cplx a1;
	cplx a2;
	cplx signal;
};

inline TwoModeStationary two_mode_stationary(const ReadoutParams& p, double mean_phonon_number)
{
	const double k1 = p.kappa1 / 2.0;
	const double k2 = p.kappa2 / 2.0;
	auto solve = [&](double g) {
		// k1 a1 + i g a2 = 0 ; i g a1 + k2 a2 = -i F
		const cplx det = k1 * k2 + g * g;
		const cplx a1 = -g * p.F / det;
		const cplx a2 = cplx{0.0, -1.0} * p.F * k1 / det;
		return std::pair{a1, a2};
	};
	const auto [a1, a2] = solve(p.theta0 + p.theta * mean_phonon_number);
	const auto [b1, b2] = solve(p.theta0);
	(void)b2;
	return {a1, a2, a1 - b1};
}

/// Fock-state probabilities of the NEMS phonon number.
class PhononDistribution
{
public:
	explicit PhononDistribution(std::vector<double> probabilities) : p_(std::move(probabilities))
	{
		if(p_.empty())
		{
			throw InputError("phonon distribution needs at least one level");
		}
		double total = 0.0;
		for(double v : p_)
		{
			if(!(v >= 0.0) || !std::isfinite(v))
			{
				throw InputError("phonon probabilities must be finite and >= 0");
			}
			total += v;
		}
		if(std::abs(total - 1.0) > 1e-12)
		{
			throw InputError("phonon probabilities must sum to 1 (got " + std::to_string(total) + ")");
		}
	}

	static PhononDistribution fock(std::size_t n)
	{
		std::vector<double> p(n + 1, 0.0);
		p[n] = 1.0;
		return PhononDistribution(std::move(p));
	}

	/// Poisson(mean) truncated where the tail drops below 1e-16 and renormalised.
	static PhononDistribution poisson(double mean)
	{
		if(!(mean >= 0.0) || !std::isfinite(mean))
		{
			throw InputError("Poisson mean must be finite and >= 0");
		}
		std::vector<double> p;
		double total = 0.0;
		for(std::size_t n = 0;; ++n)
		{
			const double k = static_cast<double>(n);
			const double v = mean == 0.0 ? (n == 0 ? 1.0 : 0.0) : std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
			p.push_back(v);
			total += v;
			if(k > mean && v < 1e-18)
			{
				break;
			}
		}
		for(double& v : p)
		{
			v /= total;
		}
		return PhononDistribution(std::move(p));
	}

	[[nodiscard]] const std::vector<double>& probabilities() const { return p_; }

	[[nodiscard]] double mean() const
	{
		double m = 0.0;
		for(std::size_t n = 0; n < p_.size(); ++n)
		{
			m += p_[n] * static_cast<double>(n);
		}
		return m;
	}

	[[nodiscard]] double variance() const
	{
		const double mu = mean();
		double v = 0.0;
		for(std::size_t n = 0; n < p_.size(); ++n)
		{
			const double dn = static_cast<double>(n) - mu;
			v += p_[n] * dn * dn;
		}
		return v;
	}

private:
	std::vector<double> p_;
};

/// Stationary signal statistics of the current. Vacuum and added noise are
/// excluded: only the phonon-number contribution G^2 Var(n) is reported.
struct CurrentStatistics
{
	double mean = 0.0;
	double signal_variance = 0.0;
	double gain = 0.0;
};

inline CurrentStatistics stationary_current_statistics(const PhononDistribution& dist, const ReadoutParams& p)
{
	const double G = stationary_gain(p);
	const auto& prob = dist.probabilities();
	double mean = 0.0;
	for(std::size_t n = 0; n < prob.size(); ++n)
	{
		mean += prob[n] * G * static_cast<double>(n);
	}
	double var = 0.0;
	for(std::size_t n = 0; n < prob.size(); ++n)
	{
		const double d = G * static_cast<double>(n) - mean;
		var += prob[n] * d * d;
	}
	return {mean, var, G};
}

} // namespace nems
