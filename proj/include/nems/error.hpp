#pragma once

#include <stdexcept>
#include <string>

namespace nems
{

// Invalid parameters, malformed configuration, label mismatches.
class InputError : public std::invalid_argument
{
public:
	using std::invalid_argument::invalid_argument;
};

// A Fock cutoff or term count too small for the requested tail tolerance.
class TruncationError : public std::runtime_error
{
public:
	TruncationError(const std::string& what, std::size_t required)
		: std::runtime_error(what), required_(required)
	{
	}

	[[nodiscard]] std::size_t required() const noexcept { return required_; }

private:
	std::size_t required_;
};

// The readout is outside the weak-coupling window and strict mode is on.
class RegimeError : public std::runtime_error
{
public:
	RegimeError(const std::string& what, double ratio) : std::runtime_error(what), ratio_(ratio) {}

	[[nodiscard]] double ratio() const noexcept { return ratio_; }

private:
	double ratio_;
};

class IntegrationError : public std::runtime_error
{
public:
	using std::runtime_error::runtime_error;
};

class EstimationError : public std::runtime_error
{
public:
	using std::runtime_error::runtime_error;
};

// Projection onto (near) degenerate conditioning targets.
class ConditioningError : public std::runtime_error
{
public:
	using std::runtime_error::runtime_error;
};

} // namespace nems
