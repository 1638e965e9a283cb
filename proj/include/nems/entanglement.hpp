#pragma once

#include "nems/error.hpp"
#include "nems/fock.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

namespace nems
{

inline constexpr double default_alpha_cap = 6.0;
inline constexpr std::size_t default_term_count = 30;
inline constexpr std::size_t max_term_count = 200;
inline constexpr double default_tail_tolerance = 1e-12;

/// Initial coherent amplitudes of NEMS (alpha) and the two resonators.
struct CoherentTriple
{
	cplx alpha;
	cplx beta;
	cplx gamma;

	void validate(double alpha_cap = default_alpha_cap) const
	{
		for(cplx z : {alpha, beta, gamma})
		{
			if(!std::isfinite(z.real()) || !std::isfinite(z.imag()))
			{
				throw InputError("coherent amplitudes must be finite");
			}
		}
		if(std::abs(alpha) > alpha_cap)
		{
			throw InputError("|alpha| = " + std::to_string(std::abs(alpha)) + " exceeds the cap of "
			                 + std::to_string(alpha_cap));
		}
	}
};

/// Amplitudes (beta_n, gamma_n) of the resonators in the n-phonon branch.
inline std::pair<cplx, cplx> branch_amplitudes(std::size_t n, double theta_t, cplx beta, cplx gamma)
{
	const double phase = static_cast<double>(n) * theta_t;
	const double c = std::cos(phase);
	const double s = std::sin(phase);
	const cplx mi{0.0, -1.0};
	return {beta * c + mi * gamma * s, gamma * c + mi * beta * s};
}

/// Phonon-conditioned beam-splitter transmittance sin^2((theta0 + theta n_b) t).
/// The whole coupling theta0 + theta n_b multiplies t.
inline double transmittance(double theta0, double theta, double mean_phonon_number, double t)
{
	if(!(t >= 0.0))
	{
		throw InputError("transmittance: t must be >= 0");
	}
	const double s = std::sin((theta0 + theta * mean_phonon_number) * t);
	return s * s;
}

/// |C_n|^2 of a coherent state, from log-factorials.
inline double coherent_weight(cplx alpha, std::size_t n)
{
	const double mean = std::norm(alpha);
	if(mean == 0.0)
	{
		return n == 0 ? 1.0 : 0.0;
	}
	const double k = static_cast<double>(n);
	return std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
}

inline cplx coherent_coefficient(cplx alpha, std::size_t n)
{
	return std::polar(std::sqrt(coherent_weight(alpha, n)), static_cast<double>(n) * std::arg(alpha));
}

/// The branch decomposition sum_n C_n |n>|beta_n>|gamma_n> at phase theta*t.
struct ConditionedState
{
	std::size_t terms = 0;
	double theta_t = 0.0;
	std::vector<cplx> C;
	std::vector<cplx> beta_n;
	std::vector<cplx> gamma_n;
	double tail_mass = 0.0; // Poisson mass of the discarded n >= terms
};

/// Builds the branch decomposition, raising the term count until the discarded
/// Poisson mass is below `tail_tolerance`.
inline ConditionedState conditioned_state(const CoherentTriple& triple, double theta_t,
                                          std::size_t terms = default_term_count,
                                          double tail_tolerance = default_tail_tolerance,
                                          std::size_t term_cap = max_term_count)
{
	triple.validate();
	if(terms < 1)
	{
		throw InputError("need at least one term");
	}
	const double mean = std::norm(triple.alpha);
	double tail = poisson_tail(mean, terms);
	while(tail > tail_tolerance)
	{
		if(++terms > term_cap)
		{
			throw TruncationError("term count cap " + std::to_string(term_cap) + " exceeded for |alpha|^2 = "
			                          + std::to_string(mean),
			                      required_dim(mean, tail_tolerance));
		}
		tail = poisson_tail(mean, terms);
	}

	ConditionedState s;
	s.terms = terms;
	s.theta_t = theta_t;
	s.tail_mass = tail;
	s.C.resize(terms);
	s.beta_n.resize(terms);
	s.gamma_n.resize(terms);
	for(std::size_t n = 0; n < terms; ++n)
	{
		s.C[n] = coherent_coefficient(triple.alpha, n);
		std::tie(s.beta_n[n], s.gamma_n[n]) = branch_amplitudes(n, theta_t, triple.beta, triple.gamma);
	}
	return s;
}

/// Linear entropies of the three bipartitions. Each carries an additive error
/// bound of twice the discarded Poisson mass.
struct EntropyReport
{
	double E_N_12 = 0.0;
	double E_1_N2 = 0.0;
	double E_2_N1 = 0.0;
	double tail_bound = 0.0;
	std::size_t terms = 0;
};

inline EntropyReport linear_entropies(const ConditionedState& s)
{
	std::vector<double> w(s.terms);
	for(std::size_t n = 0; n < s.terms; ++n)
	{
		w[n] = std::norm(s.C[n]);
	}
	double sum_n12 = 0.0;
	double sum_1 = 0.0;
	double sum_2 = 0.0;
	for(std::size_t n = 0; n < s.terms; ++n)
	{
		sum_n12 += w[n] * w[n];
		sum_1 += w[n] * w[n];
		sum_2 += w[n] * w[n];
		for(std::size_t m = n + 1; m < s.terms; ++m)
		{
			const double ww = 2.0 * w[n] * w[m];
			const double db = std::norm(s.beta_n[n] - s.beta_n[m]);
			const double dg = std::norm(s.gamma_n[n] - s.gamma_n[m]);
			sum_n12 += ww * std::exp(-db - dg);
			sum_1 += ww * std::exp(-db);
			sum_2 += ww * std::exp(-dg);
		}
	}
	auto clamp = [](double v) { return std::clamp(v, 0.0, std::nextafter(1.0, 0.0)); };
	return {clamp(1.0 - sum_n12), clamp(1.0 - sum_1), clamp(1.0 - sum_2), 2.0 * s.tail_mass, s.terms};
}

inline EntropyReport linear_entropies(const CoherentTriple& triple, double theta_t,
                                      std::size_t terms = default_term_count)
{
	return linear_entropies(conditioned_state(triple, theta_t, terms));
}

/// Upper bound 1 - sum_n |C_n|^4 on E_N|12.
inline double entropy_n12_bound(const ConditionedState& s)
{
	double p = 0.0;
	for(cplx c : s.C)
	{
		p += std::norm(c) * std::norm(c);
	}
	return 1.0 - p;
}

// ---------------------------------------------------------------------------
// Cross-checks against exact evolution in the truncated Fock space.

struct OracleDims
{
	std::size_t nems = 30;
	std::size_t tlr1 = 30;
	std::size_t tlr2 = 30;
};

/// NEMS cutoff from the alpha tail and a shared resonator cutoff closing the
/// total photon number |beta|^2 + |gamma|^2 under the beam splitter.
inline OracleDims tail_rule_dims(const CoherentTriple& triple, double tol = default_tail_tolerance)
{
	const auto n = std::max<std::size_t>(required_dim(std::norm(triple.alpha), tol), default_term_count);
	const auto pair = required_dim(std::norm(triple.beta) + std::norm(triple.gamma), tol);
	return {n, pair, pair};
}

struct OracleOptions
{
	bool include_theta0 = false;
	double theta0_over_theta = 0.0; // used when include_theta0
	double tail_tolerance = default_tail_tolerance;
	std::size_t max_matrix_entries = default_max_matrix_entries;
};

/// Exact propagation of |alpha>|beta>|gamma> under
/// H = theta (theta0/theta + b^dagger b)(a1^dagger a2 + a1 a2^dagger), theta = 1.
class BeamSplitterOracle
{
public:
	explicit BeamSplitterOracle(OracleDims dims, OracleOptions opt = {})
		: dims_(dims), opt_(opt),
		  space_({{Mode::nems, dims.nems}, {Mode::tlr1, dims.tlr1}, {Mode::tlr2, dims.tlr2}}, opt.max_matrix_entries),
		  hamiltonian_(space_, weights(dims.nems, opt), beam_splitter_generator(dims.tlr1, dims.tlr2))
	{
	}

	[[nodiscard]] const TruncatedSpace& space() const { return space_; }
	[[nodiscard]] const OracleDims& dims() const { return dims_; }

	[[nodiscard]] StateVector initial_state(const CoherentTriple& triple) const
	{
		const auto a = coherent_state(triple.alpha, dims_.nems, Mode::nems, opt_.tail_tolerance);
		const auto b = coherent_state(triple.beta, dims_.tlr1, Mode::tlr1, opt_.tail_tolerance);
		const auto g = coherent_state(triple.gamma, dims_.tlr2, Mode::tlr2, opt_.tail_tolerance);
		auto psi = tensor(tensor(a, b), g);
		return {space_, psi.amplitudes()};
	}

	[[nodiscard]] StateVector evolve(const CoherentTriple& triple, double theta_t) const
	{
		return hamiltonian_.evolve(initial_state(triple), theta_t);
	}

	/// Partial-trace linear entropies, in the same bipartition convention as
	/// `linear_entropies`.
	[[nodiscard]] EntropyReport entropies(const StateVector& psi) const
	{
		const double e_n = linear_entropy(reduced_state(psi, {Mode::nems}));
		const double e_1 = linear_entropy(reduced_state(psi, {Mode::tlr1}));
		const double e_2 = linear_entropy(reduced_state(psi, {Mode::tlr2}));
		return {e_n, e_1, e_2, 0.0, dims_.nems};
	}

private:
	static std::vector<double> weights(std::size_t dim, const OracleOptions& opt)
	{
		std::vector<double> w(dim);
		for(std::size_t n = 0; n < dim; ++n)
		{
			w[n] = static_cast<double>(n) + (opt.include_theta0 ? opt.theta0_over_theta : 0.0);
		}
		return w;
	}

	OracleDims dims_;
	OracleOptions opt_;
	TruncatedSpace space_;
	NumberConditionedHamiltonian hamiltonian_;
};

struct EntropyDiscrepancy
{
	EntropyReport analytic;
	EntropyReport oracle;
	double d_N_12 = 0.0;
	double d_1_N2 = 0.0;
	double d_2_N1 = 0.0;

	[[nodiscard]] double max() const { return std::max({d_N_12, d_1_N2, d_2_N1}); }
};

inline EntropyDiscrepancy compare_entropies(const EntropyReport& analytic, const EntropyReport& oracle)
{
	return {analytic, oracle, std::abs(analytic.E_N_12 - oracle.E_N_12), std::abs(analytic.E_1_N2 - oracle.E_1_N2),
	        std::abs(analytic.E_2_N1 - oracle.E_2_N1)};
}

/// Analytic entropy sums vs partial traces of the exactly evolved state.
inline EntropyDiscrepancy brute_force_compare(const CoherentTriple& triple, double theta_t, OracleDims dims = {},
                                              OracleOptions opt = {})
{
	triple.validate();
	const BeamSplitterOracle oracle(dims, opt);
	const auto analytic = linear_entropies(conditioned_state(triple, theta_t, dims.nems));
	return compare_entropies(analytic, oracle.entropies(oracle.evolve(triple, theta_t)));
}

/// Even (+) or odd (-) coherent cat (|a> +/- |-a>)/norm.
inline StateVector cat_state(cplx alpha, std::size_t dim, bool even, Mode mode = Mode::nems)
{
	const auto plus = coherent_state(alpha, dim, mode);
	const auto minus = coherent_state(-alpha, dim, mode);
	Eigen::VectorXcd v = even ? (plus.amplitudes() + minus.amplitudes()).eval()
	                          : (plus.amplitudes() - minus.amplitudes()).eval();
	return StateVector::normalized(plus.space(), std::move(v));
}

struct CatReport
{
	double fidelity_even = 0.0;          // conditional state on |beta>|gamma> vs even cat
	std::optional<double> fidelity_odd;  // absent when the odd cat has no weight (alpha = 0)
	double probability_plus = 0.0;       // projection probability onto |beta>|gamma>
	double probability_minus = 0.0;      // onto |-beta>|-gamma>
	double global_norm = 0.0;            // of the reassembled two-branch cat superposition
	double fidelity_reassembled = 0.0;   // of that superposition with the evolved state
	OracleDims dims;
};

inline constexpr double degenerate_overlap_limit = 1.0 - 1e-6;

/// Evolves to theta*t = pi, projects the resonators onto |beta>|gamma> and
/// |-beta>|-gamma>, and compares the conditional NEMS states with the even and
/// odd cats.
inline CatReport cat_state_check(const CoherentTriple& triple, std::size_t nems_terms = default_term_count)
{
	triple.validate();
	const double target_overlap = std::exp(-2.0 * (std::norm(triple.beta) + std::norm(triple.gamma)));
	if(target_overlap * target_overlap > degenerate_overlap_limit)
	{
		throw ConditioningError("conditioning targets |beta,gamma> and |-beta,-gamma> coincide");
	}

	auto dims = tail_rule_dims(triple);
	dims.nems = std::max(dims.nems, nems_terms);
	OracleOptions opt;
	opt.max_matrix_entries = std::max(default_max_matrix_entries, dims.tlr1 * dims.tlr1 * dims.tlr2 * dims.tlr2);
	const BeamSplitterOracle oracle(dims, opt);
	const auto psi = oracle.evolve(triple, std::numbers::pi);

	const auto project = [&](cplx b, cplx g) {
		const auto pb = coherent_state(b, dims.tlr1, Mode::tlr1);
		const auto pg = coherent_state(g, dims.tlr2, Mode::tlr2);
		const Eigen::VectorXcd target = Eigen::kroneckerProduct(pb.amplitudes(), pg.amplitudes()).eval();
		const auto block = target.size();
		Eigen::VectorXcd cond(static_cast<Eigen::Index>(dims.nems));
		for(Eigen::Index n = 0; n < cond.size(); ++n)
		{
			cond(n) = target.dot(psi.amplitudes().segment(n * block, block));
		}
		return cond;
	};

	CatReport r;
	r.dims = dims;
	const auto plus = project(triple.beta, triple.gamma);
	const auto minus = project(-triple.beta, -triple.gamma);
	r.probability_plus = plus.squaredNorm();
	r.probability_minus = minus.squaredNorm();

	const auto nspace = TruncatedSpace::single(Mode::nems, dims.nems);
	constexpr double min_probability = 1e-200;
	if(!(r.probability_plus > min_probability))
	{
		throw ConditioningError("projection onto |beta>|gamma> has vanishing probability");
	}
	r.fidelity_even = fidelity(StateVector::normalized(nspace, plus), cat_state(triple.alpha, dims.nems, true));

	const bool odd_present = triple.alpha != cplx{0.0};
	if(odd_present)
	{
		if(!(r.probability_minus > min_probability))
		{
			throw ConditioningError("projection onto |-beta>|-gamma> has vanishing probability");
		}
		r.fidelity_odd = fidelity(StateVector::normalized(nspace, minus), cat_state(triple.alpha, dims.nems, false));
	}

	// Reassemble (|a>+|-a>)/2 |b>|g> + (|a>-|-a>)/2 |-b>|-g> in the oracle space.
	const auto a_plus = coherent_state(triple.alpha, dims.nems).amplitudes();
	const auto a_minus = coherent_state(-triple.alpha, dims.nems).amplitudes();
	const auto tlr = [&](cplx b, cplx g) {
		return Eigen::kroneckerProduct(coherent_state(b, dims.tlr1, Mode::tlr1).amplitudes(),
		                               coherent_state(g, dims.tlr2, Mode::tlr2).amplitudes())
			.eval();
	};
	const Eigen::VectorXcd even = 0.5 * (a_plus + a_minus);
	const Eigen::VectorXcd odd = 0.5 * (a_plus - a_minus);
	const Eigen::VectorXcd cat = Eigen::kroneckerProduct(even, tlr(triple.beta, triple.gamma)).eval()
	                             + Eigen::kroneckerProduct(odd, tlr(-triple.beta, -triple.gamma)).eval();
	r.global_norm = cat.norm();
	r.fidelity_reassembled = std::norm(cat.dot(psi.amplitudes())) / cat.squaredNorm();
	return r;
}

/// Largest entrywise deviation between Tr_N |psi><psi| and the separable
/// mixture sum_n |C_n|^2 |beta_n><beta_n| (x) |gamma_n><gamma_n|.
struct SeparabilityReport
{
	double max_deviation = 0.0;
	double mixture_trace = 0.0;
	OracleDims dims;
};

inline SeparabilityReport separability_check_12(const CoherentTriple& triple, double theta_t,
                                                std::optional<OracleDims> dims_override = std::nullopt)
{
	triple.validate();
	const auto dims = dims_override.value_or(tail_rule_dims(triple));
	OracleOptions opt;
	opt.max_matrix_entries = std::max(default_max_matrix_entries, dims.tlr1 * dims.tlr1 * dims.tlr2 * dims.tlr2);
	const BeamSplitterOracle oracle(dims, opt);
	const auto psi = oracle.evolve(triple, theta_t);
	const auto rho12 = reduced_state(psi, {Mode::tlr1, Mode::tlr2});

	const auto s = conditioned_state(triple, theta_t, dims.nems);
	const auto d12 = static_cast<Eigen::Index>(dims.tlr1 * dims.tlr2);
	Eigen::MatrixXcd branches(d12, static_cast<Eigen::Index>(s.terms));
	Eigen::VectorXd w(static_cast<Eigen::Index>(s.terms));
	for(std::size_t n = 0; n < s.terms; ++n)
	{
		const auto b = coherent_state(s.beta_n[n], dims.tlr1, Mode::tlr1);
		const auto g = coherent_state(s.gamma_n[n], dims.tlr2, Mode::tlr2);
		branches.col(static_cast<Eigen::Index>(n)) = Eigen::kroneckerProduct(b.amplitudes(), g.amplitudes()).eval();
		w(static_cast<Eigen::Index>(n)) = std::norm(s.C[n]);
	}
	const Eigen::MatrixXcd mixture = branches * w.asDiagonal() * branches.adjoint();

	SeparabilityReport r;
	r.dims = dims;
	r.mixture_trace = mixture.trace().real();
	r.max_deviation = (rho12.matrix() - mixture).cwiseAbs().maxCoeff();
	return r;
}

} // namespace nems
