#pragma once

#include "nems/error.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

namespace nems
{

inline constexpr std::size_t min_spectral_samples = 1024;

/// Dominant angular frequency (rad/s) of a uniformly sampled real series.
///
/// The mean is removed, a Hann window applied and the record zero-padded to
/// four times the next power of two. The peak of |FFT| is refined by a
/// parabola through the log-magnitudes of the three bins around it.
inline double estimate_dominant_frequency(std::span<const double> series, double sample_interval)
{
	if(series.size() < min_spectral_samples)
	{
		throw EstimationError("spectral estimate needs at least 1024 samples, got "
		                      + std::to_string(series.size()));
	}
	if(!(sample_interval > 0.0))
	{
		throw EstimationError("sample interval must be positive");
	}

	const std::size_t n = series.size();
	double mean = 0.0;
	for(double v : series)
	{
		mean += v;
	}
	mean /= static_cast<double>(n);

	double spread = 0.0;
	double magnitude = 0.0;
	for(double v : series)
	{
		spread = std::max(spread, std::abs(v - mean));
		magnitude = std::max(magnitude, std::abs(v));
	}
	if(!(spread > 1e-12 * magnitude) || !std::isfinite(spread))
	{
		throw EstimationError("series is constant; no dominant frequency");
	}

	std::size_t padded = 1;
	while(padded < n)
	{
		padded <<= 1;
	}
	padded *= 4;

	std::vector<double> buf(padded, 0.0);
	for(std::size_t i = 0; i < n; ++i)
	{
		const double hann = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i)
		                                         / static_cast<double>(n - 1));
		buf[i] = (series[i] - mean) * hann;
	}

	Eigen::FFT<double> fft;
	std::vector<std::complex<double>> spectrum;
	fft.fwd(spectrum, buf);

	const std::size_t half = padded / 2;
	std::size_t peak = 1;
	double best = -1.0;
	for(std::size_t k = 1; k < half; ++k)
	{
		const double mag = std::abs(spectrum[k]);
		if(mag > best)
		{
			best = mag;
			peak = k;
		}
	}

	double offset = 0.0;
	if(peak > 0 && peak + 1 < half)
	{
		const double tiny = 1e-300;
		const double lm = std::log(std::abs(spectrum[peak - 1]) + tiny);
		const double l0 = std::log(std::abs(spectrum[peak]) + tiny);
		const double lp = std::log(std::abs(spectrum[peak + 1]) + tiny);
		const double denom = lm - 2.0 * l0 + lp;
		if(denom < 0.0)
		{
			offset = 0.5 * (lm - lp) / denom;
		}
	}

	const double bin = 2.0 * std::numbers::pi / (static_cast<double>(padded) * sample_interval);
	return (static_cast<double>(peak) + offset) * bin;
}

} // namespace nems
