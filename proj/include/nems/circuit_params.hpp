#pragma once

#include "nems/error.hpp"

#include <cmath>
#include <string>

namespace nems
{

namespace codata
{
inline constexpr double vacuum_permittivity = 8.8541878128e-12; // F/m
inline constexpr double reduced_planck = 1.054571817e-34;       // J s
} // namespace codata

/// Lumped-element description of two single-mode transmission-line resonators
/// sharing a vibrating plate capacitor. SI units throughout.
///
/// The defaults describe a 6 GHz (angular, 2*pi*6e9 rad/s) resonator pair with
/// a 10 nm gap and a NEMS for which hbar/(d^2 m nu) = 1e-6.
struct PhysicalCircuitParams
{
	double L1 = 1.759e-9;    // H
	double L2 = 1.759e-9;    // H
	double C1 = 4.0e-13;     // F
	double C2 = 4.0e-13;     // F
	double d = 1.0e-8;       // m, equilibrium gap on either side
	double A = 1.129e-8;     // m^2, lateral plate area
	double m = 1.6785e-22;   // kg, NEMS effective mass
	double nu = 6.283185307179586e9; // rad/s, NEMS angular frequency
	double eps0 = codata::vacuum_permittivity;
	double hbar = codata::reduced_planck;

	void validate() const
	{
		auto require = [](double v, const char* name) {
			if(!(v > 0.0) || !std::isfinite(v))
			{
				throw InputError(std::string("circuit parameter '") + name + "' must be finite and > 0");
			}
		};
		require(L1, "L1");
		require(L2, "L2");
		require(C1, "C1");
		require(C2, "C2");
		require(d, "d");
		require(A, "A");
		require(m, "m");
		require(nu, "nu");
		require(eps0, "eps0");
		require(hbar, "hbar");
	}
};

struct EffectiveParamsOptions
{
	double mean_phonon_number = 0.0;
	// Drop the x_rms^2/d^2 correction from the averaged frequencies.
	bool drop_xrms = false;
	// Reject omega_tilde1 != omega_tilde2 beyond resonance_tolerance (relative).
	bool require_resonance = false;
	double resonance_tolerance = 1e-9;
};

/// Derived constants of the phonon-number-conditioned beam-splitter coupling.
///
/// `omega_tilde*` use the adopted maximal renormalisation
/// omega_tilde^2 = omega^2 + omega_eq^2/2, so 1/Ctilde = 1/C + 1/(2 Ceq) holds
/// exactly. The x_rms-dependent value of the averaged frequency is kept
/// separately in `omega_avg*` (equal to omega_tilde* when `drop_xrms` is set).
struct EffectiveParams
{
	double Ceq = 0.0;
	double Ctilde1 = 0.0;
	double Ctilde2 = 0.0;
	double omega1 = 0.0;
	double omega2 = 0.0;
	double omega_eq1 = 0.0;
	double omega_eq2 = 0.0;
	double omega_tilde1 = 0.0;
	double omega_tilde2 = 0.0;
	double omega_avg1 = 0.0;
	double omega_avg2 = 0.0;
	double theta0 = 0.0;       // omega_tilde Ctilde1 / (4 Ceq)
	double theta0_exact = 0.0; // including the (1 - hbar/(2 d^2 m nu)) factor
	double theta = 0.0;        // -(hbar/(d^2 m nu)) theta0
	double x_rms_sq_over_d_sq = 0.0;
	double mean_phonon_number = 0.0;

	[[nodiscard]] double theta_ratio() const { return theta / theta0; }
	[[nodiscard]] double detuning() const { return std::abs(omega_tilde1 - omega_tilde2) / omega_tilde1; }
};

inline double equilibrium_capacitance(const PhysicalCircuitParams& p)
{
	p.validate();
	return p.eps0 * p.A / p.d;
}

/// Root-mean-square NEMS displacement sqrt(hbar/(m nu) (n_b + 1/2)).
inline double x_rms(const PhysicalCircuitParams& p, double mean_phonon_number)
{
	p.validate();
	if(!(mean_phonon_number >= 0.0))
	{
		throw InputError("mean phonon number must be >= 0");
	}
	return std::sqrt(p.hbar / (p.m * p.nu) * (mean_phonon_number + 0.5));
}

inline EffectiveParams effective_params(const PhysicalCircuitParams& p, const EffectiveParamsOptions& opt = {})
{
	p.validate();
	EffectiveParams e;
	e.mean_phonon_number = opt.mean_phonon_number;
	e.Ceq = equilibrium_capacitance(p);

	const double xr = x_rms(p, opt.mean_phonon_number);
	e.x_rms_sq_over_d_sq = (xr * xr) / (p.d * p.d);

	e.Ctilde1 = 1.0 / (1.0 / p.C1 + 1.0 / (2.0 * e.Ceq));
	e.Ctilde2 = 1.0 / (1.0 / p.C2 + 1.0 / (2.0 * e.Ceq));

	e.omega1 = 1.0 / std::sqrt(p.L1 * p.C1);
	e.omega2 = 1.0 / std::sqrt(p.L2 * p.C2);
	e.omega_eq1 = 1.0 / std::sqrt(e.Ceq * p.L1);
	e.omega_eq2 = 1.0 / std::sqrt(e.Ceq * p.L2);

	const double weq1 = e.omega_eq1 * e.omega_eq1;
	const double weq2 = e.omega_eq2 * e.omega_eq2;
	e.omega_tilde1 = std::sqrt(e.omega1 * e.omega1 + weq1 / 2.0);
	e.omega_tilde2 = std::sqrt(e.omega2 * e.omega2 + weq2 / 2.0);

	const double shrink = opt.drop_xrms ? 1.0 : 1.0 - e.x_rms_sq_over_d_sq;
	e.omega_avg1 = std::sqrt(e.omega1 * e.omega1 + weq1 / 2.0 * shrink);
	e.omega_avg2 = std::sqrt(e.omega2 * e.omega2 + weq2 / 2.0 * shrink);

	if(opt.require_resonance && e.detuning() > opt.resonance_tolerance)
	{
		throw InputError("resonators are not resonant: |omega_tilde1 - omega_tilde2|/omega_tilde1 = "
		                 + std::to_string(e.detuning()));
	}

	const double zero_point = p.hbar / (p.d * p.d * p.m * p.nu);
	e.theta0 = e.omega_tilde1 * e.Ctilde1 / (4.0 * e.Ceq);
	e.theta0_exact = e.theta0 * (1.0 - zero_point / 2.0);
	e.theta = -zero_point * e.theta0;
	return e;
}

/// Conversion record between SI rates and the dimensionless rates used inside
/// the readout and entanglement code (hbar = 1, rates in units of `rate_unit`).
struct UnitSystem
{
	double rate_unit = 1.0; // rad/s

	[[nodiscard]] double to_dimensionless(double rate_si) const { return rate_si / rate_unit; }
	[[nodiscard]] double to_si(double rate) const { return rate * rate_unit; }
	[[nodiscard]] double time_to_si(double t) const { return t / rate_unit; }
};

} // namespace nems
