#pragma once

#include "nems/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <complex>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

namespace nems
{

namespace detail
{

inline std::string_view trim(std::string_view s)
{
	while(!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
	{
		s.remove_prefix(1);
	}
	while(!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
	{
		s.remove_suffix(1);
	}
	return s;
}

inline std::optional<double> parse_double(std::string_view s)
{
	s = trim(s);
	if(s.empty())
	{
		return std::nullopt;
	}
	// from_chars rejects a leading '+'
	if(s.front() == '+')
	{
		s.remove_prefix(1);
	}
	double v = 0.0;
	const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
	if(ec != std::errc{} || ptr != s.data() + s.size())
	{
		return std::nullopt;
	}
	return v;
}

} // namespace detail

/// Parses "re", "re+imi", "re-imi", "imi" (also with 'j').
inline std::optional<std::complex<double>> parse_complex(std::string_view text)
{
	auto s = std::string(detail::trim(text));
	s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
	if(s.empty())
	{
		return std::nullopt;
	}
	if(s.back() != 'i' && s.back() != 'j')
	{
		if(auto re = detail::parse_double(s))
		{
			return std::complex<double>(*re, 0.0);
		}
		return std::nullopt;
	}
	s.pop_back();
	// split at the last sign that is not part of an exponent
	std::size_t split = std::string::npos;
	for(std::size_t i = s.size(); i-- > 1;)
	{
		if((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E')
		{
			split = i;
			break;
		}
	}
	auto imag_of = [](std::string_view im) -> std::optional<double> {
		if(im.empty() || im == "+")
		{
			return 1.0;
		}
		if(im == "-")
		{
			return -1.0;
		}
		return detail::parse_double(im);
	};
	if(split == std::string::npos)
	{
		const auto im = imag_of(s);
		if(!im)
		{
			return std::nullopt;
		}
		return std::complex<double>(0.0, *im);
	}
	const auto re = detail::parse_double(std::string_view(s).substr(0, split));
	const auto im = imag_of(std::string_view(s).substr(split));
	if(!re || !im)
	{
		return std::nullopt;
	}
	return std::complex<double>(*re, *im);
}

/// Flat `key = value` configuration. '#' starts a comment; blank lines are
/// ignored. Keys outside the allowed set are rejected.
class KeyValueConfig
{
public:
	KeyValueConfig() = default;

	static KeyValueConfig parse(std::istream& in, const std::set<std::string, std::less<>>& allowed,
	                            std::string_view origin = "<config>")
	{
		KeyValueConfig cfg;
		std::string line;
		std::size_t lineno = 0;
		while(std::getline(in, line))
		{
			++lineno;
			std::string_view view(line);
			if(const auto hash = view.find('#'); hash != std::string_view::npos)
			{
				view = view.substr(0, hash);
			}
			view = detail::trim(view);
			if(view.empty())
			{
				continue;
			}
			const auto eq = view.find('=');
			const auto where = std::string(origin) + ":" + std::to_string(lineno);
			if(eq == std::string_view::npos)
			{
				throw InputError(where + ": expected 'key = value'");
			}
			const auto key = std::string(detail::trim(view.substr(0, eq)));
			const auto value = std::string(detail::trim(view.substr(eq + 1)));
			if(key.empty() || value.empty())
			{
				throw InputError(where + ": empty key or value");
			}
			if(!allowed.contains(key))
			{
				throw InputError(where + ": unknown key '" + key + "'");
			}
			if(!cfg.values_.emplace(key, value).second)
			{
				throw InputError(where + ": duplicate key '" + key + "'");
			}
		}
		return cfg;
	}

	static KeyValueConfig load(const std::string& path, const std::set<std::string, std::less<>>& allowed)
	{
		std::ifstream in(path);
		if(!in)
		{
			throw InputError("cannot open config file '" + path + "'");
		}
		return parse(in, allowed, path);
	}

	[[nodiscard]] bool has(std::string_view key) const { return values_.find(key) != values_.end(); }

	[[nodiscard]] double get(std::string_view key, double fallback) const
	{
		const auto it = values_.find(key);
		if(it == values_.end())
		{
			return fallback;
		}
		const auto v = detail::parse_double(it->second);
		if(!v || !std::isfinite(*v))
		{
			throw InputError("key '" + std::string(key) + "': not a number: '" + it->second + "'");
		}
		return *v;
	}

	[[nodiscard]] std::size_t get_count(std::string_view key, std::size_t fallback) const
	{
		const double v = get(key, static_cast<double>(fallback));
		if(v < 0.0 || v != std::floor(v))
		{
			throw InputError("key '" + std::string(key) + "': expected a non-negative integer");
		}
		return static_cast<std::size_t>(v);
	}

	[[nodiscard]] std::complex<double> get_complex(std::string_view key, std::complex<double> fallback) const
	{
		const auto it = values_.find(key);
		if(it == values_.end())
		{
			return fallback;
		}
		const auto v = parse_complex(it->second);
		if(!v)
		{
			throw InputError("key '" + std::string(key) + "': not a complex number: '" + it->second + "'");
		}
		return *v;
	}

	[[nodiscard]] bool get_bool(std::string_view key, bool fallback) const
	{
		const auto it = values_.find(key);
		if(it == values_.end())
		{
			return fallback;
		}
		const auto& s = it->second;
		if(s == "true" || s == "1" || s == "yes")
		{
			return true;
		}
		if(s == "false" || s == "0" || s == "no")
		{
			return false;
		}
		throw InputError("key '" + std::string(key) + "': expected true/false");
	}

	[[nodiscard]] std::string get_string(std::string_view key, std::string fallback) const
	{
		const auto it = values_.find(key);
		return it == values_.end() ? fallback : it->second;
	}

private:
	std::map<std::string, std::string, std::less<>> values_;
};

} // namespace nems
