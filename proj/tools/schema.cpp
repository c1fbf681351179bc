#include "schema.hpp"

#include "embedded_schemas.hpp"

#include <fmt/format.h>

#include <cmath>
#include <map>
#include <regex>

namespace hoferlab::cli {

namespace {

std::string escape(const std::string& key)
{
	std::string out;
	for (char ch : key)
	{
		if (ch == '~')
			out += "~0";
		else if (ch == '/')
			out += "~1";
		else
			out += ch;
	}
	return out;
}

std::string type_of(const nlohmann::json& v)
{
	if (v.is_null())
		return "null";
	if (v.is_boolean())
		return "boolean";
	if (v.is_number_integer() || v.is_number_unsigned())
		return "integer";
	if (v.is_number())
		return "number";
	if (v.is_string())
		return "string";
	if (v.is_array())
		return "array";
	return "object";
}

bool has_type(const nlohmann::json& v, const std::string& type)
{
	const std::string actual = type_of(v);
	if (type == actual)
		return true;
	if (type == "number")
		return actual == "integer";
	// 3.0 is an integer in JSON schema
	if (type == "integer" && actual == "number")
		return std::isfinite(v.get<double>()) && v.get<double>() == std::floor(v.get<double>());
	return false;
}

void check(const nlohmann::json& schema, const nlohmann::json& v, const std::string& at)
{
	const std::string where = at.empty() ? "/" : at;
	if (schema.contains("type"))
	{
		const auto& t = schema["type"];
		bool ok = false;
		if (t.is_array())
		{
			for (const auto& one : t)
				ok = ok || has_type(v, one.get<std::string>());
		}
		else
			ok = has_type(v, t.get<std::string>());
		if (!ok)
			throw ConfigInvalid(where, fmt::format("expected {}, got {}", t.dump(), type_of(v)));
	}
	if (schema.contains("enum"))
	{
		bool found = false;
		for (const auto& e : schema["enum"])
			found = found || e == v;
		if (!found)
			throw ConfigInvalid(where, fmt::format("{} is not one of {}", v.dump(), schema["enum"].dump()));
	}
	if (v.is_number())
	{
		const double x = v.get<double>();
		if (schema.contains("minimum") && x < schema["minimum"].get<double>())
			throw ConfigInvalid(where, fmt::format("{} is below the minimum {}", v.dump(), schema["minimum"].dump()));
		if (schema.contains("maximum") && x > schema["maximum"].get<double>())
			throw ConfigInvalid(where, fmt::format("{} is above the maximum {}", v.dump(), schema["maximum"].dump()));
		if (schema.contains("exclusiveMinimum") && !(x > schema["exclusiveMinimum"].get<double>()))
			throw ConfigInvalid(where,
			                    fmt::format("{} must be greater than {}", v.dump(), schema["exclusiveMinimum"].dump()));
	}
	if (v.is_string() && schema.contains("pattern"))
	{
		if (!std::regex_search(v.get<std::string>(), std::regex(schema["pattern"].get<std::string>())))
			throw ConfigInvalid(where, fmt::format("{} does not match {}", v.dump(), schema["pattern"].dump()));
	}
	if (v.is_array())
	{
		if (schema.contains("minItems") && v.size() < schema["minItems"].get<std::size_t>())
			throw ConfigInvalid(where, fmt::format("needs at least {} items", schema["minItems"].dump()));
		if (schema.contains("items"))
			for (std::size_t i = 0; i < v.size(); ++i)
				check(schema["items"], v[i], at + "/" + std::to_string(i));
	}
	if (v.is_object())
	{
		if (schema.contains("required"))
			for (const auto& r : schema["required"])
				if (!v.contains(r.get<std::string>()))
					throw ConfigInvalid(at + "/" + escape(r.get<std::string>()), "required property is missing");
		const nlohmann::json props = schema.value("properties", nlohmann::json::object());
		const bool closed = schema.contains("additionalProperties") && schema["additionalProperties"] == false;
		for (auto it = v.begin(); it != v.end(); ++it)
		{
			const std::string path = at + "/" + escape(it.key());
			if (props.contains(it.key()))
				check(props[it.key()], it.value(), path);
			else if (closed)
				throw ConfigInvalid(path, "unknown property");
		}
	}
}

} // namespace

std::vector<std::string> schema_names()
{
	std::vector<std::string> out;
	for (const auto& [name, text] : embedded::schemas)
		out.push_back(name);
	return out;
}

const nlohmann::json& schema_for(const std::string& command)
{
	static const std::map<std::string, nlohmann::json> parsed = [] {
		std::map<std::string, nlohmann::json> m;
		for (const auto& [name, text] : embedded::schemas)
			m[name] = nlohmann::json::parse(text);
		return m;
	}();
	auto it = parsed.find(command);
	if (it == parsed.end())
		throw ConfigInvalid("/", "no schema for command '" + command + "'");
	return it->second;
}

void validate(const nlohmann::json& schema, const nlohmann::json& value) { check(schema, value, ""); }

nlohmann::json with_defaults(const nlohmann::json& schema, const nlohmann::json& value)
{
	nlohmann::json out = value;
	const nlohmann::json props = schema.value("properties", nlohmann::json::object());
	for (const auto& [key, prop] : props.items())
		if (!out.contains(key) && prop.contains("default"))
			out[key] = prop["default"];
	return out;
}

} // namespace hoferlab::cli
