#pragma once

#include "nems/classical_circuit.hpp"
#include "nems/error.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace nems
{

inline std::string format_number(double v)
{
	char buf[48];
	std::snprintf(buf, sizeof buf, "%.12e", v);
	return buf;
}

/// Header row plus numeric rows, every value printed with %.12e.
class CsvTable
{
public:
	explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

	void add_row(std::span<const double> row)
	{
		if(row.size() != header_.size())
		{
			throw InputError("CSV row width does not match header");
		}
		rows_.emplace_back(row.begin(), row.end());
	}

	void add_row(std::initializer_list<double> row) { add_row(std::span<const double>(row.begin(), row.size())); }

	[[nodiscard]] const std::vector<std::string>& header() const { return header_; }
	[[nodiscard]] const std::vector<std::vector<double>>& rows() const { return rows_; }

	[[nodiscard]] std::string str() const
	{
		std::string out;
		for(std::size_t i = 0; i < header_.size(); ++i)
		{
			out += (i ? "," : "") + header_[i];
		}
		out += '\n';
		for(const auto& r : rows_)
		{
			for(std::size_t i = 0; i < r.size(); ++i)
			{
				if(i)
				{
					out += ',';
				}
				out += format_number(r[i]);
			}
			out += '\n';
		}
		return out;
	}

private:
	std::vector<std::string> header_;
	std::vector<std::vector<double>> rows_;
};

/// Writes to `<path>.tmp` and renames over `path`.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents)
{
	auto tmp = path;
	tmp += ".tmp";
	{
		std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
		if(!out)
		{
			throw InputError("cannot write '" + tmp.string() + "'");
		}
		out << contents;
		if(!out.flush())
		{
			throw InputError("write failed for '" + tmp.string() + "'");
		}
	}
	std::filesystem::rename(tmp, path);
}

/// `t,Q1,P1,Q2,P2` in SI units.
inline CsvTable trajectory_table(std::span<const CircuitSample> samples)
{
	CsvTable t({"t", "Q1", "P1", "Q2", "P2"});
	for(const auto& s : samples)
	{
		t.add_row({s.t, s.Q1, s.P1, s.Q2, s.P2});
	}
	return t;
}

} // namespace nems
