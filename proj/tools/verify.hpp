#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace hoferlab::cli {

struct CheckResult
{
	std::string name;
	bool pass = false;
	nlohmann::json details;
};

struct SuiteReport
{
	std::string suite;
	std::uint64_t seed = 0;
	std::vector<CheckResult> checks;

	int passed() const;
	int failed() const;
	/// {suite, seed, checks: [{name, status, details}], passed, failed}; no timings.
	nlohmann::json summary() const;
};

/// "core" runs small corpora, "all" adds the full-size corpora and the
/// slower experiments. Deterministic for a given seed.
SuiteReport run_verify(const std::string& suite, std::uint64_t seed);

} // namespace hoferlab::cli
