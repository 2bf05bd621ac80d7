#pragma once

#include <cstdint>
#include <string>

#include "rddg/tabular.hpp"

namespace rddg {

/// The four built-in benchmark datasets with engineered inter-attribute
/// correlations. Generator coefficients are fixed constants chosen so class
/// counts at n=1000 land near consumer_behavior {Home 518, Food 482},
/// health_metrics {500, 300, 200}, real_estate {yes 212, no 788} and
/// social_network {789, 86, 55, 70}.
enum class BenchmarkName { consumer_behavior, health_metrics, real_estate, social_network };

BenchmarkName parse_benchmark_name(const std::string& name);  // throws ConfigError
std::string benchmark_name_string(BenchmarkName name);

Schema benchmark_schema(BenchmarkName name);

/// Deterministic given seed. Real estate prices follow
///   price = base_per_sqm(location) * size * renovation * (1 - 0.004 * age) + noise
/// so the pricing rule is recoverable from the generated data.
Dataset generate_benchmark(BenchmarkName name, std::size_t n, std::uint64_t seed);

Dataset generate_benchmark(const std::string& name, std::size_t n, std::uint64_t seed);

/// Base price per square meter used by the real-estate pricing rule;
/// exposed so analyses can reconstruct the engineered product term.
double real_estate_base_price(const std::string& location);

}  // namespace rddg
