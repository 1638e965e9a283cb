#pragma once

// Dense truncated-Fock-space linear algebra. This is the brute-force oracle the
// closed-form results are checked against, so nothing in here knows about
// coherent-state branch amplitudes or the analytic entropy sums.

#include "nems/error.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nems
{

using cplx = std::complex<double>;

enum class Mode
{
	nems,
	tlr1,
	tlr2,
};

inline std::string_view to_string(Mode m)
{
	switch(m)
	{
	case Mode::nems: return "N";
	case Mode::tlr1: return "TLR1";
	case Mode::tlr2: return "TLR2";
	}
	return "?";
}

inline constexpr std::size_t default_max_matrix_entries = std::size_t{1} << 20;
inline constexpr std::size_t max_state_entries = std::size_t{1} << 24;

/// Ordered tensor product of truncated Fock spaces. The first factor is the
/// most significant index of the product basis (Kronecker order).
class TruncatedSpace
{
public:
	struct Factor
	{
		Mode mode;
		std::size_t dim;

		bool operator==(const Factor&) const = default;
	};

	TruncatedSpace(std::vector<Factor> factors, std::size_t max_matrix_entries = default_max_matrix_entries)
		: factors_(std::move(factors)), max_matrix_entries_(max_matrix_entries)
	{
		if(factors_.empty())
		{
			throw InputError("truncated space needs at least one mode");
		}
		dimension_ = 1;
		for(std::size_t i = 0; i < factors_.size(); ++i)
		{
			if(factors_[i].dim < 2)
			{
				throw InputError("Fock cutoff for mode " + std::string(to_string(factors_[i].mode))
				                 + " must be >= 2");
			}
			for(std::size_t j = 0; j < i; ++j)
			{
				if(factors_[j].mode == factors_[i].mode)
				{
					throw InputError("duplicate mode label " + std::string(to_string(factors_[i].mode)));
				}
			}
			dimension_ *= factors_[i].dim;
			if(dimension_ > max_state_entries)
			{
				throw InputError("truncated space dimension exceeds " + std::to_string(max_state_entries));
			}
		}
	}

	static TruncatedSpace single(Mode mode, std::size_t dim) { return TruncatedSpace({{mode, dim}}); }

	[[nodiscard]] std::size_t dimension() const { return dimension_; }
	[[nodiscard]] const std::vector<Factor>& factors() const { return factors_; }
	[[nodiscard]] std::size_t size() const { return factors_.size(); }
	[[nodiscard]] std::size_t max_matrix_entries() const { return max_matrix_entries_; }

	[[nodiscard]] bool contains(Mode m) const
	{
		return std::any_of(factors_.begin(), factors_.end(), [m](const Factor& f) { return f.mode == m; });
	}

	[[nodiscard]] std::size_t position(Mode m) const
	{
		for(std::size_t i = 0; i < factors_.size(); ++i)
		{
			if(factors_[i].mode == m)
			{
				return i;
			}
		}
		throw InputError("mode " + std::string(to_string(m)) + " is not part of this space");
	}

	[[nodiscard]] std::size_t dim(Mode m) const { return factors_[position(m)].dim; }

	/// Sub-space of the kept modes, in this space's order.
	[[nodiscard]] TruncatedSpace subspace(std::span<const Mode> keep) const
	{
		if(keep.empty())
		{
			throw InputError("empty mode subset");
		}
		for(Mode m : keep)
		{
			(void)position(m);
		}
		std::vector<Factor> out;
		for(const auto& f : factors_)
		{
			if(std::find(keep.begin(), keep.end(), f.mode) != keep.end())
			{
				out.push_back(f);
			}
		}
		if(out.size() != keep.size())
		{
			throw InputError("duplicate mode in subset");
		}
		return TruncatedSpace(std::move(out), max_matrix_entries_);
	}

	void require_matrix_fits() const
	{
		if(dimension_ > max_matrix_entries_ / dimension_)
		{
			throw InputError("dense matrix over dimension " + std::to_string(dimension_)
			                 + " exceeds the configured cap of " + std::to_string(max_matrix_entries_)
			                 + " entries");
		}
	}

	bool operator==(const TruncatedSpace& o) const { return factors_ == o.factors_; }

private:
	std::vector<Factor> factors_;
	std::size_t dimension_ = 1;
	std::size_t max_matrix_entries_;
};

inline TruncatedSpace tensor(const TruncatedSpace& a, const TruncatedSpace& b)
{
	auto f = a.factors();
	f.insert(f.end(), b.factors().begin(), b.factors().end());
	return TruncatedSpace(std::move(f), std::max(a.max_matrix_entries(), b.max_matrix_entries()));
}

class Operator
{
public:
	Operator(TruncatedSpace space, Eigen::MatrixXcd matrix) : space_(std::move(space)), matrix_(std::move(matrix))
	{
		space_.require_matrix_fits();
		const auto d = static_cast<Eigen::Index>(space_.dimension());
		if(matrix_.rows() != d || matrix_.cols() != d)
		{
			throw InputError("operator matrix does not match space dimension " + std::to_string(d));
		}
	}

	[[nodiscard]] const TruncatedSpace& space() const { return space_; }
	[[nodiscard]] const Eigen::MatrixXcd& matrix() const { return matrix_; }

	[[nodiscard]] Operator adjoint() const { return {space_, matrix_.adjoint()}; }

	[[nodiscard]] bool is_hermitian(double tol) const
	{
		const double scale = std::max(1.0, matrix_.cwiseAbs().maxCoeff());
		return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
	}

	friend Operator operator*(const Operator& a, const Operator& b)
	{
		same_space(a, b);
		return {a.space_, a.matrix_ * b.matrix_};
	}
	friend Operator operator+(const Operator& a, const Operator& b)
	{
		same_space(a, b);
		return {a.space_, a.matrix_ + b.matrix_};
	}
	friend Operator operator-(const Operator& a, const Operator& b)
	{
		same_space(a, b);
		return {a.space_, a.matrix_ - b.matrix_};
	}
	friend Operator operator*(cplx s, const Operator& a) { return {a.space_, s * a.matrix_}; }

private:
	static void same_space(const Operator& a, const Operator& b)
	{
		if(!(a.space_ == b.space_))
		{
			throw InputError("operators act on different spaces");
		}
	}

	TruncatedSpace space_;
	Eigen::MatrixXcd matrix_;
};

inline Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

inline Operator identity(const TruncatedSpace& space)
{
	const auto d = static_cast<Eigen::Index>(space.dimension());
	space.require_matrix_fits();
	return {space, Eigen::MatrixXcd::Identity(d, d)};
}

/// Truncated ladder operator, <n-1|a|n> = sqrt(n).
inline Operator annihilation(std::size_t dim, Mode mode = Mode::nems)
{
	auto space = TruncatedSpace::single(mode, dim);
	const auto d = static_cast<Eigen::Index>(dim);
	Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(d, d);
	for(Eigen::Index n = 1; n < d; ++n)
	{
		a(n - 1, n) = std::sqrt(static_cast<double>(n));
	}
	return {std::move(space), std::move(a)};
}

inline Operator creation(std::size_t dim, Mode mode = Mode::nems) { return annihilation(dim, mode).adjoint(); }

inline Operator number(std::size_t dim, Mode mode = Mode::nems)
{
	auto space = TruncatedSpace::single(mode, dim);
	const auto d = static_cast<Eigen::Index>(dim);
	Eigen::MatrixXcd n = Eigen::MatrixXcd::Zero(d, d);
	for(Eigen::Index k = 0; k < d; ++k)
	{
		n(k, k) = static_cast<double>(k);
	}
	return {std::move(space), std::move(n)};
}

inline Operator tensor(const Operator& a, const Operator& b)
{
	return {tensor(a.space(), b.space()), Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval()};
}

/// Places a single-mode operator on `mode` of `space`, identity elsewhere.
inline Operator embed(const Operator& local, Mode mode, const TruncatedSpace& space)
{
	if(local.space().size() != 1)
	{
		throw InputError("embed expects a single-mode operator");
	}
	if(local.space().factors()[0].mode != mode)
	{
		throw InputError("label mismatch: operator acts on " + std::string(to_string(local.space().factors()[0].mode))
		                 + ", requested " + std::string(to_string(mode)));
	}
	const std::size_t pos = space.position(mode);
	if(space.factors()[pos].dim != local.space().dimension())
	{
		throw InputError("cutoff mismatch embedding mode " + std::string(to_string(mode)));
	}
	space.require_matrix_fits();
	Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
	for(std::size_t i = 0; i < space.size(); ++i)
	{
		const auto d = static_cast<Eigen::Index>(space.factors()[i].dim);
		if(i == pos)
		{
			m = Eigen::kroneckerProduct(m, local.matrix()).eval();
		}
		else
		{
			m = Eigen::kroneckerProduct(m, Eigen::MatrixXcd::Identity(d, d)).eval();
		}
	}
	return {space, std::move(m)};
}

inline Operator embed(const Operator& local, const TruncatedSpace& space)
{
	if(local.space().size() != 1)
	{
		throw InputError("embed expects a single-mode operator");
	}
	return embed(local, local.space().factors()[0].mode, space);
}

class StateVector
{
public:
	static constexpr double norm_tolerance = 1e-12;

	StateVector(TruncatedSpace space, Eigen::VectorXcd amplitudes)
		: space_(std::move(space)), amplitudes_(std::move(amplitudes))
	{
		check_size();
		if(std::abs(amplitudes_.norm() - 1.0) > norm_tolerance)
		{
			throw InputError("state vector is not normalised (norm = " + std::to_string(amplitudes_.norm()) + ")");
		}
	}

	static StateVector normalized(TruncatedSpace space, Eigen::VectorXcd amplitudes)
	{
		const double n = amplitudes.norm();
		if(!(n > 0.0) || !std::isfinite(n))
		{
			throw InputError("cannot normalise a zero or non-finite vector");
		}
		amplitudes /= n;
		return {std::move(space), std::move(amplitudes)};
	}

	[[nodiscard]] const TruncatedSpace& space() const { return space_; }
	[[nodiscard]] const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }

private:
	void check_size() const
	{
		if(amplitudes_.size() != static_cast<Eigen::Index>(space_.dimension()))
		{
			throw InputError("state vector length does not match space dimension");
		}
	}

	TruncatedSpace space_;
	Eigen::VectorXcd amplitudes_;
};

inline StateVector tensor(const StateVector& a, const StateVector& b)
{
	return StateVector::normalized(tensor(a.space(), b.space()),
	                               Eigen::kroneckerProduct(a.amplitudes(), b.amplitudes()).eval());
}

inline StateVector fock_state(std::size_t n, std::size_t dim, Mode mode = Mode::nems)
{
	if(n >= dim)
	{
		throw InputError("Fock index outside the truncated space");
	}
	Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
	v(static_cast<Eigen::Index>(n)) = 1.0;
	return {TruncatedSpace::single(mode, dim), std::move(v)};
}

inline cplx inner(const StateVector& a, const StateVector& b)
{
	if(!(a.space() == b.space()))
	{
		throw InputError("states live in different spaces");
	}
	return a.amplitudes().dot(b.amplitudes());
}

inline double fidelity(const StateVector& a, const StateVector& b) { return std::norm(inner(a, b)); }

inline cplx expectation(const Operator& op, const StateVector& psi)
{
	if(!(op.space() == psi.space()))
	{
		throw InputError("operator and state live in different spaces");
	}
	return psi.amplitudes().dot(op.matrix() * psi.amplitudes());
}

class DensityMatrix
{
public:
	static constexpr double hermitian_tolerance = 1e-12;
	static constexpr double trace_tolerance = 1e-10;
	static constexpr double eigenvalue_tolerance = 1e-10;

	/// Validates hermiticity, unit trace and positivity.
	DensityMatrix(TruncatedSpace space, Eigen::MatrixXcd matrix) : space_(std::move(space)), matrix_(std::move(matrix))
	{
		check_shape();
		if((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > hermitian_tolerance)
		{
			throw InputError("density matrix is not Hermitian");
		}
		if(std::abs(matrix_.trace() - 1.0) > trace_tolerance)
		{
			throw InputError("density matrix trace differs from 1");
		}
		Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix_, Eigen::EigenvaluesOnly);
		if(es.eigenvalues().minCoeff() < -eigenvalue_tolerance)
		{
			throw InputError("density matrix has a negative eigenvalue");
		}
	}

	static DensityMatrix pure(const StateVector& psi)
	{
		psi.space().require_matrix_fits();
		return DensityMatrix(psi.space(), psi.amplitudes() * psi.amplitudes().adjoint(), trusted{});
	}

	[[nodiscard]] const TruncatedSpace& space() const { return space_; }
	[[nodiscard]] const Eigen::MatrixXcd& matrix() const { return matrix_; }
	[[nodiscard]] double trace() const { return matrix_.trace().real(); }
	[[nodiscard]] double purity() const { return matrix_.cwiseAbs2().sum(); }

private:
	struct trusted
	{
	};

	// Positive by construction (M M^dagger or partial traces thereof).
	DensityMatrix(TruncatedSpace space, Eigen::MatrixXcd matrix, trusted)
		: space_(std::move(space)), matrix_(std::move(matrix))
	{
		check_shape();
	}

	void check_shape() const
	{
		space_.require_matrix_fits();
		const auto d = static_cast<Eigen::Index>(space_.dimension());
		if(matrix_.rows() != d || matrix_.cols() != d)
		{
			throw InputError("density matrix does not match space dimension");
		}
	}

	friend DensityMatrix reduced_state(const StateVector&, std::span<const Mode>);
	friend DensityMatrix partial_trace(const DensityMatrix&, std::span<const Mode>);

	TruncatedSpace space_;
	Eigen::MatrixXcd matrix_;
};

namespace detail
{

// For each global basis index, its index within the kept and traced factors.
struct SplitIndex
{
	std::vector<std::size_t> keep;
	std::vector<std::size_t> rest;
	std::size_t keep_dim = 1;
	std::size_t rest_dim = 1;
};

inline SplitIndex split_index(const TruncatedSpace& space, std::span<const Mode> keep)
{
	const auto& f = space.factors();
	std::vector<bool> kept(f.size(), false);
	for(Mode m : keep)
	{
		kept[space.position(m)] = true;
	}
	SplitIndex s;
	for(std::size_t i = 0; i < f.size(); ++i)
	{
		(kept[i] ? s.keep_dim : s.rest_dim) *= f[i].dim;
	}
	const std::size_t total = space.dimension();
	s.keep.resize(total);
	s.rest.resize(total);
	std::vector<std::size_t> digit(f.size(), 0);
	for(std::size_t g = 0; g < total; ++g)
	{
		std::size_t k = 0;
		std::size_t r = 0;
		for(std::size_t i = 0; i < f.size(); ++i)
		{
			if(kept[i])
			{
				k = k * f[i].dim + digit[i];
			}
			else
			{
				r = r * f[i].dim + digit[i];
			}
		}
		s.keep[g] = k;
		s.rest[g] = r;
		for(std::size_t i = f.size(); i-- > 0;)
		{
			if(++digit[i] < f[i].dim)
			{
				break;
			}
			digit[i] = 0;
		}
	}
	return s;
}

} // namespace detail

/// Reduced state of a pure state on the kept modes, rho = M M^dagger with M
/// the amplitudes reshaped to (kept, traced).
inline DensityMatrix reduced_state(const StateVector& psi, std::span<const Mode> keep)
{
	auto sub = psi.space().subspace(keep);
	sub.require_matrix_fits();
	const auto split = detail::split_index(psi.space(), keep);
	Eigen::MatrixXcd m(static_cast<Eigen::Index>(split.keep_dim), static_cast<Eigen::Index>(split.rest_dim));
	const auto& amp = psi.amplitudes();
	for(std::size_t g = 0; g < psi.space().dimension(); ++g)
	{
		m(static_cast<Eigen::Index>(split.keep[g]), static_cast<Eigen::Index>(split.rest[g]))
			= amp(static_cast<Eigen::Index>(g));
	}
	Eigen::MatrixXcd rho = m * m.adjoint();
	return DensityMatrix(std::move(sub), std::move(rho), DensityMatrix::trusted{});
}

inline DensityMatrix reduced_state(const StateVector& psi, std::initializer_list<Mode> keep)
{
	return reduced_state(psi, std::span<const Mode>(keep.begin(), keep.size()));
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const Mode> keep)
{
	auto sub = rho.space().subspace(keep);
	const auto split = detail::split_index(rho.space(), keep);
	// table[k * rest_dim + r] = global index
	std::vector<std::size_t> table(rho.space().dimension());
	for(std::size_t g = 0; g < table.size(); ++g)
	{
		table[split.keep[g] * split.rest_dim + split.rest[g]] = g;
	}
	const auto dk = static_cast<Eigen::Index>(split.keep_dim);
	Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dk, dk);
	const auto& m = rho.matrix();
	for(std::size_t i = 0; i < split.keep_dim; ++i)
	{
		for(std::size_t j = 0; j < split.keep_dim; ++j)
		{
			cplx acc = 0.0;
			for(std::size_t r = 0; r < split.rest_dim; ++r)
			{
				acc += m(static_cast<Eigen::Index>(table[i * split.rest_dim + r]),
				         static_cast<Eigen::Index>(table[j * split.rest_dim + r]));
			}
			out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = acc;
		}
	}
	return DensityMatrix(std::move(sub), std::move(out), DensityMatrix::trusted{});
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<Mode> keep)
{
	return partial_trace(rho, std::span<const Mode>(keep.begin(), keep.size()));
}

/// 1 - Tr(rho^2), clamped to [0, 1 - 1/D].
inline double linear_entropy(const DensityMatrix& rho)
{
	const double d = static_cast<double>(rho.space().dimension());
	return std::clamp(1.0 - rho.purity(), 0.0, 1.0 - 1.0 / d);
}

/// Eigen-decomposition of a Hermitian matrix, split into the connected
/// components of its sparsity pattern. Number-conserving generators break into
/// small blocks, which keeps exact propagation cheap at large cutoffs.
class HermitianEigensystem
{
public:
	struct Block
	{
		std::vector<Eigen::Index> indices;
		Eigen::VectorXd values;
		Eigen::MatrixXcd vectors;
	};

	explicit HermitianEigensystem(const Eigen::MatrixXcd& h) : dim_(h.rows())
	{
		const Eigen::Index n = h.rows();
		std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
		std::iota(parent.begin(), parent.end(), Eigen::Index{0});
		auto find = [&](Eigen::Index i) {
			while(parent[static_cast<std::size_t>(i)] != i)
			{
				auto& p = parent[static_cast<std::size_t>(i)];
				p = parent[static_cast<std::size_t>(p)];
				i = p;
			}
			return i;
		};
		for(Eigen::Index j = 0; j < n; ++j)
		{
			for(Eigen::Index i = 0; i < j; ++i)
			{
				if(h(i, j) != cplx{0.0} || h(j, i) != cplx{0.0})
				{
					const auto a = find(i);
					const auto b = find(j);
					if(a != b)
					{
						parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
					}
				}
			}
		}
		std::vector<Eigen::Index> block_of(static_cast<std::size_t>(n), -1);
		for(Eigen::Index i = 0; i < n; ++i)
		{
			const auto root = find(i);
			auto& b = block_of[static_cast<std::size_t>(root)];
			if(b < 0)
			{
				b = static_cast<Eigen::Index>(blocks_.size());
				blocks_.emplace_back();
			}
			blocks_[static_cast<std::size_t>(b)].indices.push_back(i);
		}
		for(auto& blk : blocks_)
		{
			const auto m = static_cast<Eigen::Index>(blk.indices.size());
			Eigen::MatrixXcd sub(m, m);
			for(Eigen::Index r = 0; r < m; ++r)
			{
				for(Eigen::Index c = 0; c < m; ++c)
				{
					sub(r, c) = h(blk.indices[static_cast<std::size_t>(r)], blk.indices[static_cast<std::size_t>(c)]);
				}
			}
			Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sub);
			blk.values = es.eigenvalues();
			blk.vectors = es.eigenvectors();
		}
	}

	[[nodiscard]] Eigen::Index dim() const { return dim_; }
	[[nodiscard]] const std::vector<Block>& blocks() const { return blocks_; }

	[[nodiscard]] Eigen::VectorXd eigenvalues() const
	{
		Eigen::VectorXd out(dim_);
		Eigen::Index k = 0;
		for(const auto& b : blocks_)
		{
			out.segment(k, b.values.size()) = b.values;
			k += b.values.size();
		}
		std::sort(out.begin(), out.end());
		return out;
	}

	/// exp(-i H t) v
	[[nodiscard]] Eigen::VectorXcd propagate(const Eigen::VectorXcd& v, double t) const
	{
		Eigen::VectorXcd out(dim_);
		for(const auto& b : blocks_)
		{
			const auto m = static_cast<Eigen::Index>(b.indices.size());
			Eigen::VectorXcd sub(m);
			for(Eigen::Index r = 0; r < m; ++r)
			{
				sub(r) = v(b.indices[static_cast<std::size_t>(r)]);
			}
			Eigen::VectorXcd c = b.vectors.adjoint() * sub;
			for(Eigen::Index r = 0; r < m; ++r)
			{
				c(r) *= std::exp(cplx(0.0, -b.values(r) * t));
			}
			sub = b.vectors * c;
			for(Eigen::Index r = 0; r < m; ++r)
			{
				out(b.indices[static_cast<std::size_t>(r)]) = sub(r);
			}
		}
		return out;
	}

private:
	Eigen::Index dim_;
	std::vector<Block> blocks_;
};

inline constexpr double hermiticity_tolerance = 1e-10;

/// exp(-i H t) psi0 via the Hermitian eigen-decomposition of H (hbar = 1).
inline StateVector evolve(const Operator& h, double t, const StateVector& psi0)
{
	if(!(h.space() == psi0.space()))
	{
		throw InputError("Hamiltonian and state live in different spaces");
	}
	if(!h.is_hermitian(hermiticity_tolerance))
	{
		throw InputError("evolve requires a Hermitian generator");
	}
	if(t == 0.0)
	{
		return psi0;
	}
	const HermitianEigensystem es(h.matrix());
	return StateVector::normalized(psi0.space(), es.propagate(psi0.amplitudes(), t));
}

/// General matrix exponential (scaling and squaring with Pade approximants).
inline Eigen::MatrixXcd matrix_exponential(const Eigen::MatrixXcd& m) { return m.exp(); }

/// H = sum_n w_n |n><n| (x) G, with the control mode the first factor of the
/// space and G acting on the remaining factors. G is diagonalised once and each
/// control sector evolves exactly.
class NumberConditionedHamiltonian
{
public:
	NumberConditionedHamiltonian(TruncatedSpace space, std::vector<double> weights, const Operator& generator)
		: space_(std::move(space)), weights_(std::move(weights)), generator_(generator), eigen_(generator.matrix())
	{
		if(space_.size() < 2)
		{
			throw InputError("number-conditioned Hamiltonian needs a control mode and at least one target");
		}
		if(weights_.size() != space_.factors()[0].dim)
		{
			throw InputError("one weight per control Fock level required");
		}
		std::vector<TruncatedSpace::Factor> rest(space_.factors().begin() + 1, space_.factors().end());
		if(!(TruncatedSpace(rest) == generator.space()))
		{
			throw InputError("generator space does not match the target modes");
		}
		if(!generator.is_hermitian(hermiticity_tolerance))
		{
			throw InputError("generator must be Hermitian");
		}
	}

	[[nodiscard]] const TruncatedSpace& space() const { return space_; }
	[[nodiscard]] const std::vector<double>& weights() const { return weights_; }

	[[nodiscard]] StateVector evolve(const StateVector& psi, double t) const
	{
		if(!(psi.space() == space_))
		{
			throw InputError("state does not live in the Hamiltonian's space");
		}
		const auto block = eigen_.dim();
		Eigen::VectorXcd out(psi.amplitudes().size());
		for(std::size_t n = 0; n < weights_.size(); ++n)
		{
			const auto offset = static_cast<Eigen::Index>(n) * block;
			out.segment(offset, block) = eigen_.propagate(psi.amplitudes().segment(offset, block), weights_[n] * t);
		}
		return StateVector::normalized(space_, std::move(out));
	}

	/// Dense matrix of H; only for spaces within the matrix cap.
	[[nodiscard]] Operator to_operator() const
	{
		space_.require_matrix_fits();
		const auto d = static_cast<Eigen::Index>(weights_.size());
		Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(d, d);
		for(Eigen::Index n = 0; n < d; ++n)
		{
			w(n, n) = weights_[static_cast<std::size_t>(n)];
		}
		return {space_, Eigen::kroneckerProduct(w, generator_.matrix()).eval()};
	}

private:
	TruncatedSpace space_;
	std::vector<double> weights_;
	Operator generator_;
	HermitianEigensystem eigen_;
};

/// a1^dagger a2 + a1 a2^dagger on (TLR1, TLR2), filled element-wise.
inline Operator beam_splitter_generator(std::size_t dim1, std::size_t dim2)
{
	TruncatedSpace space({{Mode::tlr1, dim1}, {Mode::tlr2, dim2}},
	                     std::max(default_max_matrix_entries, dim1 * dim1 * dim2 * dim2));
	const auto d = static_cast<Eigen::Index>(dim1 * dim2);
	const auto d2 = static_cast<Eigen::Index>(dim2);
	Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(d, d);
	// a1^dagger a2 |n1, n2> = sqrt((n1 + 1) n2) |n1 + 1, n2 - 1>
	for(Eigen::Index n1 = 0; n1 + 1 < static_cast<Eigen::Index>(dim1); ++n1)
	{
		for(Eigen::Index n2 = 1; n2 < d2; ++n2)
		{
			const double v = std::sqrt(static_cast<double>((n1 + 1) * n2));
			const auto from = n1 * d2 + n2;
			const auto to = (n1 + 1) * d2 + (n2 - 1);
			k(to, from) = v;
			k(from, to) = v;
		}
	}
	return {std::move(space), std::move(k)};
}

/// Sum_{n >= cutoff} e^{-mean} mean^n / n!, summed directly (no 1 - head).
inline double poisson_tail(double mean, std::size_t cutoff)
{
	if(!(mean >= 0.0) || !std::isfinite(mean))
	{
		throw InputError("Poisson mean must be finite and >= 0");
	}
	if(mean == 0.0)
	{
		return cutoff == 0 ? 1.0 : 0.0;
	}
	const double c = static_cast<double>(cutoff);
	if(c <= mean)
	{
		double head = 0.0;
		for(std::size_t n = 0; n < cutoff; ++n)
		{
			const double k = static_cast<double>(n);
			head += std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
		}
		return std::max(0.0, 1.0 - head);
	}
	double sum = 0.0;
	for(std::size_t n = cutoff;; ++n)
	{
		const double k = static_cast<double>(n);
		const double term = std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
		sum += term;
		if(term <= 1e-18 * sum || term == 0.0)
		{
			break;
		}
	}
	return sum;
}

/// Smallest cutoff whose Poisson(mean) tail is <= tol.
inline std::size_t required_dim(double mean, double tol, std::size_t cap = 4096)
{
	for(std::size_t d = 2; d <= cap; ++d)
	{
		if(poisson_tail(mean, d) <= tol)
		{
			return d;
		}
	}
	throw TruncationError("no cutoff up to " + std::to_string(cap) + " meets the tail tolerance", cap);
}

inline double coherent_tail_mass(cplx amplitude, std::size_t dim) { return poisson_tail(std::norm(amplitude), dim); }

/// Truncated coherent state, renormalised after truncation. Throws when the
/// discarded tail mass exceeds `tail_tolerance`.
inline StateVector coherent_state(cplx amplitude, std::size_t dim, Mode mode = Mode::nems, double tail_tolerance = 1e-12)
{
	if(!std::isfinite(amplitude.real()) || !std::isfinite(amplitude.imag()))
	{
		throw InputError("coherent amplitude must be finite");
	}
	const double tail = coherent_tail_mass(amplitude, dim);
	if(tail > tail_tolerance)
	{
		const auto need = required_dim(std::norm(amplitude), tail_tolerance);
		throw TruncationError("coherent state tail mass " + std::to_string(tail) + " exceeds tolerance; need dim >= "
		                          + std::to_string(need),
		                      need);
	}
	const auto d = static_cast<Eigen::Index>(dim);
	Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d);
	if(amplitude == cplx{0.0})
	{
		v(0) = 1.0;
		return {TruncatedSpace::single(mode, dim), std::move(v)};
	}
	const double r = std::abs(amplitude);
	const double phase = std::arg(amplitude);
	for(Eigen::Index n = 0; n < d; ++n)
	{
		const double k = static_cast<double>(n);
		const double mag = std::exp(-0.5 * r * r + k * std::log(r) - 0.5 * std::lgamma(k + 1.0));
		v(n) = std::polar(mag, k * phase);
	}
	return StateVector::normalized(TruncatedSpace::single(mode, dim), std::move(v));
}

/// Debug dump, row-major `re,im` pairs.
inline void dump_csv(std::ostream& os, const Eigen::MatrixXcd& m)
{
	char buf[64];
	for(Eigen::Index r = 0; r < m.rows(); ++r)
	{
		for(Eigen::Index c = 0; c < m.cols(); ++c)
		{
			std::snprintf(buf, sizeof buf, "%.12e,%.12e", m(r, c).real(), m(r, c).imag());
			os << (c ? "," : "") << buf;
		}
		os << '\n';
	}
}

} // namespace nems
