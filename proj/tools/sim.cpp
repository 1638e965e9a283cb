#include "commands.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <iostream>
#include <map>

namespace
{

using Command = int (*)(const nems::cli::RunConfig&, const std::filesystem::path&, std::ostream&);

const std::map<std::string, Command>& commands()
{
	static const std::map<std::string, Command> table = {
		{"params", nems::cli::cmd_params},     {"current", nems::cli::cmd_current},
		{"entropy", nems::cli::cmd_entropy},   {"cat", nems::cli::cmd_cat},
		{"classical", nems::cli::cmd_classical}, {"verify", nems::cli::cmd_verify},
	};
	return table;
}

} // namespace

int main(int argc, char** argv)
{
	CLI::App app{"NEMS phonon-readout and tripartite-entanglement simulator"};
	std::string command;
	std::string config_path;
	std::string out_dir = "out";
	bool strict = false;

	std::vector<std::string> names;
	for(const auto& [name, fn] : commands())
	{
		names.push_back(name);
	}
	app.add_option("command", command, "subcommand")->required()->check(CLI::IsMember(names));
	app.add_option("--config", config_path, "key = value configuration file");
	app.add_option("--out", out_dir, "output directory");
	app.add_flag("--strict", strict, "treat weak-coupling regime violations as errors");

	try
	{
		app.parse(argc, argv);
	}
	catch(const CLI::CallForHelp& e)
	{
		return app.exit(e);
	}
	catch(const CLI::ParseError& e)
	{
		app.exit(e);
		return nems::cli::exit_input_error;
	}

	try
	{
		const auto kv = config_path.empty() ? nems::KeyValueConfig{}
		                                    : nems::KeyValueConfig::load(config_path, nems::cli::known_keys());
		auto rc = nems::cli::make_run_config(kv);
		if(strict)
		{
			rc.regime = nems::RegimeMode::strict;
		}
		const std::filesystem::path out(out_dir);
		std::filesystem::create_directories(out);
		return commands().at(command)(rc, out, std::cout);
	}
	catch(const nems::InputError& e)
	{
		std::cerr << "input error: " << e.what() << "\n";
		return nems::cli::exit_input_error;
	}
	catch(const nems::RegimeError& e)
	{
		std::cerr << "regime error: " << e.what() << "\n";
		return nems::cli::exit_input_error;
	}
	catch(const nems::TruncationError& e)
	{
		std::cerr << "truncation error: " << e.what() << " (required dimension " << e.required() << ")\n";
		return nems::cli::exit_input_error;
	}
	catch(const nems::ConditioningError& e)
	{
		std::cerr << "conditioning error: " << e.what() << "\n";
		return nems::cli::exit_input_error;
	}
	catch(const std::exception& e)
	{
		std::cerr << "error: " << e.what() << "\n";
		return nems::cli::exit_verification_failed;
	}
}
