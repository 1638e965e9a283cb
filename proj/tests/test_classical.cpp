#include "nems/classical_circuit.hpp"
#include "nems/csv.hpp"
#include "nems/spectral.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace nems;

namespace
{

std::vector<double> charges(const std::vector<CircuitSample>& s, bool first = true)
{
	std::vector<double> q;
	q.reserve(s.size());
	for(const auto& x : s)
	{
		q.push_back(first ? x.Q1 : x.Q2);
	}
	return q;
}

ClassicalCircuitConfig free_circuit(double periods, std::size_t samples)
{
	ClassicalCircuitConfig cfg;
	const auto e = effective_params(cfg.params);
	cfg.t_end = periods * 2.0 * std::numbers::pi / e.omega_tilde1;
	cfg.samples = samples;
	return cfg;
}

} // namespace

TEST(ClassicalCircuit, ZeroStaysZero)
{
	auto cfg = free_circuit(5.0, 64);
	const auto traj = simulate_classical_circuit(cfg);
	ASSERT_EQ(traj.size(), 64u);
	for(const auto& s : traj)
	{
		EXPECT_EQ(s.Q1, 0.0);
		EXPECT_EQ(s.P1, 0.0);
		EXPECT_EQ(s.Q2, 0.0);
		EXPECT_EQ(s.P2, 0.0);
	}
	EXPECT_DOUBLE_EQ(traj.back().t, cfg.t_end);
}

// With x = 0 the stiffness matrix is [[1/C + k, k], [k, 1/C + k]]/L, k = 1/(2 Ceq):
// symmetric data oscillate at sqrt((1/C + 2k)/L), antisymmetric at 1/sqrt(LC).
TEST(ClassicalCircuit, NormalModesClosedForm)
{
	auto cfg = free_circuit(20.0, 401);
	const auto& p = cfg.params;
	const double k = 1.0 / (2.0 * p.eps0 * p.A / p.d);
	const double w_sym = std::sqrt((1.0 / p.C1 + 2.0 * k) / p.L1);
	const double w_anti = 1.0 / std::sqrt(p.L1 * p.C1);
	const double q0 = 1e-15;

	for(int sign : {+1, -1})
	{
		cfg.Q1 = q0;
		cfg.Q2 = sign * q0;
		cfg.rel_tol = 1e-12;
		const double w = sign > 0 ? w_sym : w_anti;
		const auto traj = simulate_classical_circuit(cfg);
		double worst = 0.0;
		for(const auto& s : traj)
		{
			worst = std::max(worst, std::abs(s.Q1 - q0 * std::cos(w * s.t)) / q0);
			worst = std::max(worst, std::abs(s.Q2 - sign * q0 * std::cos(w * s.t)) / q0);
			worst = std::max(worst, std::abs(s.P1 + p.L1 * q0 * w * std::sin(w * s.t)) / (p.L1 * q0 * w));
		}
		EXPECT_LT(worst, 1e-8) << "sign " << sign;
	}
}

TEST(ClassicalCircuit, EnergyDriftOverThousandPeriods)
{
	auto cfg = free_circuit(1000.0, 1001);
	cfg.Q1 = 1e-15;
	cfg.P2 = 3e-25;
	cfg.rel_tol = 1e-12;
	const auto traj = simulate_classical_circuit(cfg);
	const double e0 = circuit_energy(cfg, traj.front());
	double drift = 0.0;
	for(const auto& s : traj)
	{
		drift = std::max(drift, std::abs(circuit_energy(cfg, s) - e0) / e0);
	}
	EXPECT_LT(drift, 1e-8);
}

// x -> -x with V -> -V and the resonator labels swapped maps solutions onto solutions.
TEST(ClassicalCircuit, MirrorSymmetry)
{
	auto cfg = free_circuit(30.0, 301);
	const double d = cfg.params.d;
	const double nu = 7.3 * effective_params(cfg.params).omega_tilde1;
	cfg.x_drive = [=](double t) { return 0.3 * d * std::cos(nu * t); };
	cfg.v_ct = [](double t) { return 1e-4 * (1.0 + std::sin(1e9 * t)); };
	cfg.Q1 = 2e-15;
	cfg.P1 = 1e-25;
	cfg.Q2 = -5e-16;
	cfg.rel_tol = 1e-12;

	auto mirror = cfg;
	mirror.x_drive = [=](double t) { return -0.3 * d * std::cos(nu * t); };
	mirror.v_ct = [](double t) { return -1e-4 * (1.0 + std::sin(1e9 * t)); };
	mirror.Q1 = cfg.Q2;
	mirror.P1 = cfg.P2;
	mirror.Q2 = cfg.Q1;
	mirror.P2 = cfg.P1;

	const auto a = simulate_classical_circuit(cfg);
	const auto b = simulate_classical_circuit(mirror);
	double scale = 0.0;
	for(const auto& s : a)
	{
		scale = std::max({scale, std::abs(s.Q1), std::abs(s.Q2)});
	}
	for(std::size_t i = 0; i < a.size(); ++i)
	{
		EXPECT_NEAR(a[i].Q1, b[i].Q2, 1e-8 * scale);
		EXPECT_NEAR(a[i].Q2, b[i].Q1, 1e-8 * scale);
	}
}

TEST(ClassicalCircuit, ConstantBiasShiftsEquilibrium)
{
	// With x = 0 and constant V the static charges solve K q = f.
	auto cfg = free_circuit(1.0, 2);
	const auto& p = cfg.params;
	const double v = 1e-3;
	cfg.v_ct = [v](double) { return v; };
	const double k = 1.0 / (2.0 * p.eps0 * p.A / p.d);
	const double a = 1.0 / p.C1 + k;
	// a q1 + k q2 = -v/2 ; k q1 + a q2 = v/2
	const double det = a * a - k * k;
	cfg.Q1 = (-v / 2.0 * a - k * v / 2.0) / det;
	cfg.Q2 = (a * v / 2.0 + k * v / 2.0) / det;
	const auto traj = simulate_classical_circuit(cfg);
	EXPECT_NEAR(traj.back().Q1, cfg.Q1, 1e-9 * std::abs(cfg.Q1));
	EXPECT_NEAR(traj.back().Q2, cfg.Q2, 1e-9 * std::abs(cfg.Q2));
}

TEST(ClassicalCircuit, AveragingPutsPeakNearOmegaTilde)
{
	auto cfg = free_circuit(400.0, 16384);
	const double omega = effective_params(cfg.params).omega_tilde1;
	const double x0 = cfg.params.d * std::sqrt(2e-6);
	const double nu = 10.0 * omega;
	cfg.x_drive = [=](double t) { return x0 * std::cos(nu * t); };
	cfg.Q1 = 1e-15;
	const auto traj = simulate_classical_circuit(cfg);
	const auto q = charges(traj);
	const double peak = estimate_dominant_frequency(q, cfg.t_end / static_cast<double>(cfg.samples - 1));
	EXPECT_LT(std::abs(peak - omega) / omega, 0.02);
}

TEST(ClassicalCircuit, InputErrors)
{
	auto cfg = free_circuit(2.0, 32);
	const double d = cfg.params.d;
	cfg.x_drive = [d](double) { return d; };
	EXPECT_THROW((void)simulate_classical_circuit(cfg), InputError);

	cfg = free_circuit(2.0, 32);
	cfg.samples = 1;
	EXPECT_THROW((void)simulate_classical_circuit(cfg), InputError);

	cfg = free_circuit(2.0, 32);
	cfg.t_end = 0.0;
	EXPECT_THROW((void)simulate_classical_circuit(cfg), InputError);

	cfg = free_circuit(2.0, 32);
	cfg.rel_tol = 0.0;
	EXPECT_THROW((void)simulate_classical_circuit(cfg), InputError);

	cfg = free_circuit(2.0, 32);
	cfg.params.C1 = -1.0;
	EXPECT_THROW((void)simulate_classical_circuit(cfg), InputError);
}

TEST(ClassicalCircuit, StepBudgetReported)
{
	auto cfg = free_circuit(50.0, 16);
	cfg.Q1 = 1e-15;
	cfg.max_steps = 10;
	EXPECT_THROW((void)simulate_classical_circuit(cfg), IntegrationError);
}

TEST(ClassicalCircuit, TrajectoryCsv)
{
	auto cfg = free_circuit(1.0, 3);
	cfg.Q1 = 1e-15;
	const auto traj = simulate_classical_circuit(cfg);
	const auto text = trajectory_table(traj).str();
	EXPECT_EQ(text.substr(0, text.find('\n')), "t,Q1,P1,Q2,P2");
	EXPECT_NE(text.find("0.000000000000e+00,1.000000000000e-15,"), std::string::npos);
	EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
}

TEST(Spectral, PureSinusoid)
{
	const double f = 3.7;
	const double w = 2.0 * std::numbers::pi * f;
	const std::size_t n = 2048;
	const double dt = 20.0 / f / static_cast<double>(n); // 20 periods
	std::vector<double> x(n);
	for(std::size_t i = 0; i < n; ++i)
	{
		x[i] = 2.0 + std::sin(w * dt * static_cast<double>(i) + 0.4);
	}
	EXPECT_LT(std::abs(estimate_dominant_frequency(x, dt) - w) / w, 1e-3);
}

TEST(Spectral, LargerOfTwoSinusoids)
{
	const std::size_t n = 4096;
	const double dt = 1e-3;
	const double w1 = 2.0 * std::numbers::pi * 40.0;
	const double w2 = 2.0 * std::numbers::pi * 130.0;
	std::vector<double> x(n), y(n);
	for(std::size_t i = 0; i < n; ++i)
	{
		const double t = dt * static_cast<double>(i);
		x[i] = 0.4 * std::cos(w1 * t) + 1.0 * std::cos(w2 * t);
		y[i] = 1.0 * std::cos(w1 * t) + 0.4 * std::cos(w2 * t);
	}
	EXPECT_LT(std::abs(estimate_dominant_frequency(x, dt) - w2) / w2, 1e-3);
	EXPECT_LT(std::abs(estimate_dominant_frequency(y, dt) - w1) / w1, 1e-3);
}

TEST(Spectral, TinyAmplitudeSignal)
{
	const std::size_t n = 1024;
	std::vector<double> x(n);
	for(std::size_t i = 0; i < n; ++i)
	{
		x[i] = 1e-18 * std::cos(0.3 * static_cast<double>(i));
	}
	EXPECT_LT(std::abs(estimate_dominant_frequency(x, 1.0) - 0.3) / 0.3, 1e-3);
}

TEST(Spectral, Errors)
{
	std::vector<double> short_series(1023, 1.0);
	EXPECT_THROW((void)estimate_dominant_frequency(short_series, 1.0), EstimationError);
	std::vector<double> flat(2048, 5.0);
	EXPECT_THROW((void)estimate_dominant_frequency(flat, 1.0), EstimationError);
	std::vector<double> zero(2048, 0.0);
	EXPECT_THROW((void)estimate_dominant_frequency(zero, 1.0), EstimationError);
	std::vector<double> ok(2048);
	for(std::size_t i = 0; i < ok.size(); ++i)
	{
		ok[i] = std::sin(0.1 * static_cast<double>(i));
	}
	EXPECT_THROW((void)estimate_dominant_frequency(ok, 0.0), EstimationError);
}
