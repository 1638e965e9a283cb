#include "nems/circuit_params.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace nems;

TEST(EquilibriumCapacitance, HandCalculation)
{
	PhysicalCircuitParams p;
	p.eps0 = 8.854e-12;
	p.A = 1e-12;
	p.d = 1e-8;
	EXPECT_NEAR(equilibrium_capacitance(p), 8.854e-16, 1e-28);
}

TEST(EquilibriumCapacitance, UnitScaling)
{
	PhysicalCircuitParams p;
	p.d = 1e-8;
	p.A = p.d / p.eps0;
	EXPECT_NEAR(equilibrium_capacitance(p), 1.0, 1e-15);
}

TEST(EquilibriumCapacitance, DoublingGapHalves)
{
	PhysicalCircuitParams p;
	const double c = equilibrium_capacitance(p);
	p.d *= 2.0;
	EXPECT_NEAR(equilibrium_capacitance(p), c / 2.0, 1e-15 * c);
}

TEST(XRms, GroundStateHandCalculation)
{
	PhysicalCircuitParams p;
	p.m = 1e-18;
	p.nu = 2.0 * std::numbers::pi * 1e9;
	// sqrt(1.054571817e-34 / (1e-18 * 6.283185307179586e9) / 2)
	EXPECT_NEAR(x_rms(p, 0.0), 9.160794657696e-14, 1e-25);
	EXPECT_NEAR(x_rms(p, 0.0), std::sqrt(p.hbar / (2.0 * p.m * p.nu)), 1e-27);
}

TEST(XRms, ScalesWithOccupation)
{
	const PhysicalCircuitParams p;
	const double x0 = x_rms(p, 0.0);
	for(double n : {0.5, 1.0, 3.0, 10.0})
	{
		EXPECT_NEAR(x_rms(p, n) / x0, std::sqrt((n + 0.5) / 0.5), 1e-13);
	}
	EXPECT_THROW((void)x_rms(p, -1.0), InputError);
}

TEST(EffectiveParams, ZeroPointRatioTuned)
{
	PhysicalCircuitParams p;
	// hbar/(m nu) * 1/2 / d^2 = 1e-6
	p.m = p.hbar * 0.5 / (p.nu * p.d * p.d * 1e-6);
	const auto e = effective_params(p);
	EXPECT_NEAR(e.x_rms_sq_over_d_sq, 1e-6, 1e-18);
}

TEST(EffectiveParams, DoubleEquilibriumCapacitance)
{
	PhysicalCircuitParams p;
	const double ceq = equilibrium_capacitance(p);
	p.C1 = 2.0 * ceq;
	p.C2 = 2.0 * ceq;
	const auto e = effective_params(p);
	EXPECT_NEAR(e.Ctilde1 / ceq, 1.0, 1e-14);
	EXPECT_NEAR(e.Ctilde2 / ceq, 1.0, 1e-14);
}

TEST(EffectiveParams, DefaultsGiveMicroRatio)
{
	const auto e = effective_params(PhysicalCircuitParams{});
	EXPECT_LT(e.theta, 0.0);
	EXPECT_GT(e.theta0, 0.0);
	EXPECT_NEAR(e.theta_ratio(), -1e-6, 1e-9);
}

TEST(EffectiveParams, ExactRelations)
{
	const PhysicalCircuitParams p;
	const auto e = effective_params(p);
	EXPECT_NEAR(e.omega_tilde1 * e.omega_tilde1, e.omega1 * e.omega1 + e.omega_eq1 * e.omega_eq1 / 2.0,
	            1e-14 * e.omega_tilde1 * e.omega_tilde1);
	EXPECT_NEAR(1.0 / e.Ctilde1 - 1.0 / p.C1, 1.0 / (2.0 * e.Ceq), 1e-12 / (2.0 * e.Ceq));
	EXPECT_NEAR(e.theta * p.d * p.d * p.m * p.nu / p.hbar, -e.theta0, 1e-14 * e.theta0);
	// theta0 = omega_tilde Ctilde / (4 Ceq), by hand from the raw inputs
	const double ceq = p.eps0 * p.A / p.d;
	const double ct = 1.0 / (1.0 / p.C1 + 0.5 / ceq);
	const double wt = std::sqrt(1.0 / (p.L1 * p.C1) + 0.5 / (p.L1 * ceq));
	EXPECT_NEAR(e.theta0, wt * ct / (4.0 * ceq), 1e-12 * e.theta0);
	EXPECT_NEAR(e.theta0_exact, e.theta0 * (1.0 - 0.5 * p.hbar / (p.d * p.d * p.m * p.nu)), 1e-12 * e.theta0);
}

TEST(EffectiveParams, XrmsCorrectionAndDropFlag)
{
	const PhysicalCircuitParams p;
	EffectiveParamsOptions opt;
	opt.mean_phonon_number = 2.0;
	const auto e = effective_params(p, opt);
	const double x2 = x_rms(p, 2.0) * x_rms(p, 2.0) / (p.d * p.d);
	EXPECT_NEAR(e.x_rms_sq_over_d_sq, x2, 1e-15 * x2);
	EXPECT_NEAR(e.omega_avg1 * e.omega_avg1, e.omega1 * e.omega1 + e.omega_eq1 * e.omega_eq1 / 2.0 * (1.0 - x2),
	            1e-13 * e.omega_avg1 * e.omega_avg1);
	EXPECT_LT(e.omega_avg1, e.omega_tilde1);

	opt.drop_xrms = true;
	const auto dropped = effective_params(p, opt);
	EXPECT_EQ(dropped.omega_avg1, dropped.omega_tilde1);
	EXPECT_EQ(dropped.omega_tilde1, e.omega_tilde1);
}

TEST(EffectiveParams, ResonanceTolerance)
{
	PhysicalCircuitParams p;
	p.C2 *= 1.01;
	EffectiveParamsOptions opt;
	EXPECT_NO_THROW((void)effective_params(p, opt));
	opt.require_resonance = true;
	EXPECT_THROW((void)effective_params(p, opt), InputError);
	opt.resonance_tolerance = 0.1;
	EXPECT_NO_THROW((void)effective_params(p, opt));
}

TEST(PhysicalCircuitParams, RejectsNonPositive)
{
	for(double PhysicalCircuitParams::*field :
	    {&PhysicalCircuitParams::L1, &PhysicalCircuitParams::L2, &PhysicalCircuitParams::C1, &PhysicalCircuitParams::C2,
	     &PhysicalCircuitParams::d, &PhysicalCircuitParams::A, &PhysicalCircuitParams::m, &PhysicalCircuitParams::nu,
	     &PhysicalCircuitParams::eps0, &PhysicalCircuitParams::hbar})
	{
		PhysicalCircuitParams p;
		p.*field = 0.0;
		EXPECT_THROW(p.validate(), InputError);
		p.*field = -1.0;
		EXPECT_THROW((void)effective_params(p), InputError);
		p.*field = std::nan("");
		EXPECT_THROW(p.validate(), InputError);
	}
}

TEST(UnitSystem, RoundTrip)
{
	const UnitSystem u{2.5e8};
	EXPECT_DOUBLE_EQ(u.to_si(u.to_dimensionless(3.7e9)), 3.7e9);
	EXPECT_DOUBLE_EQ(u.to_dimensionless(2.5e8), 1.0);
	EXPECT_DOUBLE_EQ(u.time_to_si(2.5e8), 1.0);
}
