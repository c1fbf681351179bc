#include "commands.hpp"
#include "schema.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <memory>

namespace {

using nlohmann::json;

std::string option_name(std::string key)
{
	for (char& ch : key)
		if (ch == '_')
			ch = '-';
	return "--" + key;
}

/// Converts a command-line string by the schema type; values that do not
/// convert are kept as strings and rejected by validation.
json convert(const json& prop, const std::string& text)
{
	const std::string type = prop.value("type", "string");
	try
	{
		std::size_t used = 0;
		if (type == "integer")
		{
			const long long v = std::stoll(text, &used);
			if (used == text.size())
				return v;
		}
		else if (type == "number")
		{
			const double v = std::stod(text, &used);
			if (used == text.size())
				return v;
		}
	}
	catch (const std::exception&)
	{
	}
	return text;
}

struct Bound
{
	std::string key;
	json prop;
	CLI::Option* option = nullptr;
	std::vector<std::string> values;
	bool flag = false;
};

} // namespace

int main(int argc, char** argv)
{
	CLI::App app{"Numerical toolkit for Hofer-type lengths of Hamiltonian paths", "hoferlab"};
	app.require_subcommand(1);
	std::map<std::string, std::vector<std::unique_ptr<Bound>>> bound;
	for (const auto& name : hoferlab::cli::schema_names())
	{
		const json& schema = hoferlab::cli::schema_for(name);
		CLI::App* sub = app.add_subcommand(name, schema.value("description", ""));
		for (const auto& [key, prop] : schema["properties"].items())
		{
			auto b = std::make_unique<Bound>();
			b->key = key;
			b->prop = prop;
			std::string help = prop.value("description", "");
			if (prop.contains("default"))
				help += " [default: " + prop["default"].dump() + "]";
			if (prop.contains("enum"))
				help += " {" + prop["enum"].dump() + "}";
			const std::string type = prop.value("type", "string");
			if (type == "boolean")
				b->option = sub->add_flag(option_name(key), b->flag, help);
			else if (type == "array")
				b->option = sub->add_option(option_name(key), b->values, help)->delimiter(',');
			else
				b->option = sub->add_option(option_name(key), b->values, help)->expected(1);
			bound[name].push_back(std::move(b));
		}
	}
	try
	{
		app.parse(argc, argv);
	}
	catch (const CLI::CallForHelp& e)
	{
		return app.exit(e);
	}
	catch (const CLI::ParseError& e)
	{
		app.exit(e);
		return hoferlab::cli::kExitConfigInvalid;
	}
	const CLI::App* chosen = app.get_subcommands().front();
	const std::string name = chosen->get_name();
	json options = json::object();
	for (const auto& b : bound[name])
	{
		if (b->option->count() == 0)
			continue;
		if (b->prop.value("type", "string") == "boolean")
			options[b->key] = b->flag;
		else if (b->prop.value("type", "string") == "array")
		{
			json arr = json::array();
			for (const auto& v : b->values)
				arr.push_back(convert(b->prop.value("items", json::object()), v));
			options[b->key] = arr;
		}
		else
			options[b->key] = convert(b->prop, b->values.front());
	}
	try
	{
		return hoferlab::cli::run(name, hoferlab::cli::merge_config(options), std::cout, std::cerr);
	}
	catch (const hoferlab::cli::ConfigInvalid& e)
	{
		std::cerr << "config invalid at " << e.pointer() << ": " << e.what() << "\n";
		return hoferlab::cli::kExitConfigInvalid;
	}
	catch (const hoferlab::cli::IOFailure& e)
	{
		std::cerr << "io error: " << e.what() << "\n";
		return hoferlab::cli::kExitIO;
	}
}
