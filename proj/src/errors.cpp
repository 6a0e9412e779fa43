#include "lapo/errors.hpp"

namespace lapo {

EmptySample::EmptySample() : Error("sample has no correct lengths") {}

BudgetMissing::BudgetMissing() : Error("rollout carries no declared budget") {}

EmptyBenchmark::EmptyBenchmark() : Error("evaluation bank is empty") {}

InsufficientTiers::InsufficientTiers(std::size_t tiers)
    : Error("difficulty allocation needs at least 2 tiers, got " + std::to_string(tiers)) {}

ValidationError::ValidationError(const std::string& key_path, const std::string& what)
    : Error(key_path.empty() ? what : key_path + ": " + what), key_path_(key_path) {}

}  // namespace lapo
