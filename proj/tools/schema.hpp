#pragma once

// Validation of command configs against the JSON schemas in schemas/. Only
// the keywords used there are understood: type, properties, required,
// additionalProperties, items, minItems, minimum, maximum, exclusiveMinimum,
// enum and pattern.

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace hoferlab::cli {

class ConfigInvalid : public std::runtime_error
{
public:
	ConfigInvalid(std::string pointer, const std::string& what)
	    : std::runtime_error(what), pointer_(std::move(pointer))
	{
	}
	/// JSON pointer of the offending key.
	const std::string& pointer() const noexcept { return pointer_; }

private:
	std::string pointer_;
};

/// Names of the embedded schemas, one per subcommand.
std::vector<std::string> schema_names();
/// Embedded schema for a subcommand.
const nlohmann::json& schema_for(const std::string& command);

/// Throws ConfigInvalid at the first violation.
void validate(const nlohmann::json& schema, const nlohmann::json& value);

/// Copy of `value` with the schema defaults filled in for absent top-level keys.
nlohmann::json with_defaults(const nlohmann::json& schema, const nlohmann::json& value);

} // namespace hoferlab::cli
