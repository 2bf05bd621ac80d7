#include "rddg/benchmark_data.hpp"

#include <algorithm>
#include <cmath>

#include "rddg/error.hpp"
#include "rddg/rng.hpp"

namespace rddg {

namespace {

AttributeSpec numeric_attr(std::string name, std::string description) {
  return AttributeSpec{std::move(name), AttributeKind::numeric, std::move(description), {}};
}

AttributeSpec categorical_attr(std::string name, std::string description,
                               std::vector<std::string> categories) {
  return AttributeSpec{std::move(name), AttributeKind::categorical, std::move(description),
                       std::move(categories)};
}

std::string pick(Rng& rng, const std::vector<std::string>& values,
                 const std::vector<double>& probs) {
  double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    acc += probs[i];
    if (u < acc) return values[i];
  }
  return values.back();
}

double clamp(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Row finish_row(const Schema& schema, std::vector<Cell> cells) {
  Row row;
  row.cells = std::move(cells);
  row.label = schema.class_index(std::get<std::string>(row.cells[schema.label_index()]));
  return row;
}

// ---- consumer behavior -----------------------------------------------------

Schema consumer_behavior_schema() {
  Schema s;
  s.attributes = {
      numeric_attr("Age", "Customer age in years"),
      categorical_attr("Gender", "Customer gender", {"male", "female"}),
      numeric_attr("Income", "Annual income; grows with age and education"),
      numeric_attr("SpendingScore", "Spending score from 1 to 100, tied to income"),
      categorical_attr("EducationLevel", "Highest completed education",
                       {"high_school", "bachelor", "master", "phd"}),
      categorical_attr("MaritalStatus", "Marital status; marriage rate grows with age",
                       {"single", "married", "divorced"}),
      numeric_attr("Children", "Number of children in the household"),
      categorical_attr("Location", "Residential area type", {"urban", "suburban", "rural"}),
      categorical_attr("ProductCategory", "Dominant purchase category", {"Home", "Food"}),
  };
  s.label = "ProductCategory";
  s.classes = {"Home", "Food"};
  return s;
}

Dataset generate_consumer_behavior(std::size_t n, std::uint64_t seed) {
  const Schema schema = consumer_behavior_schema();
  Rng rng(Rng::derive(seed, 11));
  Dataset ds;
  ds.schema = schema;
  ds.rows.reserve(n);
  const std::vector<double> edu_bonus = {0.0, 12000.0, 22000.0, 32000.0};
  for (std::size_t i = 0; i < n; ++i) {
    double age = std::floor(rng.uniform(18.0, 70.0));
    std::string gender = pick(rng, {"male", "female"}, {0.5, 0.5});
    std::string education = pick(rng, {"high_school", "bachelor", "master", "phd"},
                                 {0.30, 0.40, 0.22, 0.08});
    int edu_idx = schema.attributes[4].category_index(education);
    double income = 15000.0 + 900.0 * (age - 18.0) + edu_bonus[edu_idx] + rng.normal(0.0, 6000.0);
    income = std::round(clamp(income, 8000.0, 160000.0));
    double spending = 50.0 + (income - 48000.0) / 2500.0 + rng.normal(0.0, 12.0);
    spending = std::round(clamp(spending, 1.0, 100.0));
    double p_married = clamp(0.08 + 0.016 * (age - 18.0), 0.0, 0.78);
    double u = rng.uniform();
    std::string marital = u < p_married ? "married" : (u < p_married + 0.12 ? "divorced" : "single");
    double children = std::round(clamp(rng.normal(marital == "married" ? 1.8 : 0.5, 1.0), 0.0, 5.0));
    std::string location = pick(rng, {"urban", "suburban", "rural"}, {0.40, 0.40, 0.20});

    double score = -0.83 + 0.75 * (marital == "married") + 0.28 * children +
                   0.45 * (location == "suburban") + (income - 48000.0) / 90000.0;
    std::string product = rng.uniform() < sigmoid(score) ? "Home" : "Food";

    ds.rows.push_back(finish_row(
        schema, {age, gender, income, spending, education, marital, children, location, product}));
  }
  return ds;
}

// ---- health metrics --------------------------------------------------------

Schema health_metrics_schema() {
  Schema s;
  s.attributes = {
      numeric_attr("Age", "Patient age in years"),
      categorical_attr("Gender", "Patient gender", {"male", "female"}),
      numeric_attr("Height", "Height in centimeters"),
      numeric_attr("Weight", "Weight in kilograms; tracks height and age"),
      numeric_attr("HeartRate", "Resting heart rate in beats per minute"),
      numeric_attr("SystolicBP", "Systolic blood pressure; rises with age and body mass"),
      numeric_attr("DiastolicBP", "Diastolic blood pressure; tracks systolic"),
      numeric_attr("Cholesterol", "Total cholesterol in mg/dL; rises with age"),
      categorical_attr("RiskLevel", "Cardiovascular risk level",
                       {"low risk", "medium risk", "high risk"}),
  };
  s.label = "RiskLevel";
  s.classes = {"low risk", "medium risk", "high risk"};
  return s;
}

Dataset generate_health_metrics(std::size_t n, std::uint64_t seed) {
  const Schema schema = health_metrics_schema();
  Rng rng(Rng::derive(seed, 23));
  Dataset ds;
  ds.schema = schema;
  ds.rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double age = std::floor(rng.uniform(20.0, 80.0));
    std::string gender = pick(rng, {"male", "female"}, {0.5, 0.5});
    double height = std::round(rng.normal(gender == "male" ? 176.0 : 163.0, 7.0));
    double bmi = clamp(rng.normal(23.0 + 0.06 * (age - 20.0), 3.5), 16.0, 45.0);
    double weight = std::round(bmi * (height / 100.0) * (height / 100.0));
    double heart_rate = std::round(rng.normal(72.0, 8.0) + 0.35 * (bmi - 23.0));
    double systolic = std::round(95.0 + 0.45 * age + 1.1 * (bmi - 23.0) + rng.normal(0.0, 8.0));
    double diastolic = std::round(8.0 + 0.58 * systolic + rng.normal(0.0, 5.0));
    double cholesterol = std::round(150.0 + 0.9 * age + 2.2 * (bmi - 23.0) + rng.normal(0.0, 20.0));

    double risk = (age - 50.0) / 17.0 + 0.8 * (bmi - 24.0) / 3.5 + 0.7 * (systolic - 130.0) / 15.0 +
                  0.5 * (cholesterol - 200.0) / 35.0 + rng.normal(0.0, 0.6);
    // thresholds picked for class shares of roughly 50/30/20
    std::string level = risk < -0.39 ? "low risk" : (risk < 1.74 ? "medium risk" : "high risk");

    ds.rows.push_back(finish_row(schema, {age, gender, height, weight, heart_rate, systolic,
                                          diastolic, cholesterol, level}));
  }
  return ds;
}

// ---- real estate -----------------------------------------------------------

Schema real_estate_schema() {
  Schema s;
  s.attributes = {
      numeric_attr("Size", "Apartment size in square meters"),
      categorical_attr("Location", "Location tier; sets the base price per square meter",
                       {"rural", "suburb", "downtown"}),
      numeric_attr("Age", "Building age in years; discounts the price"),
      numeric_attr("RenovationLevel", "Renovation quality multiplier applied to the price"),
      numeric_attr("Price", "Listing price: base per sqm x size x renovation, minus age discount"),
      categorical_attr("HouseType", "Property type", {"apartment", "townhouse", "detached"}),
      categorical_attr("TrafficConvenience", "Access to public transport", {"low", "medium", "high"}),
      categorical_attr("SchoolDistrict", "Whether the property sits in a school district",
                       {"yes", "no"}),
  };
  s.label = "SchoolDistrict";
  s.classes = {"yes", "no"};
  return s;
}

}  // namespace

double real_estate_base_price(const std::string& location) {
  if (location == "rural") return 25.0;
  if (location == "suburb") return 45.0;
  if (location == "downtown") return 75.0;
  throw DataError("unknown real-estate location: " + location);
}

namespace {

Dataset generate_real_estate(std::size_t n, std::uint64_t seed) {
  const Schema schema = real_estate_schema();
  Rng rng(Rng::derive(seed, 37));
  Dataset ds;
  ds.schema = schema;
  ds.rows.reserve(n);
  const std::vector<double> renovation_levels = {0.8, 1.0, 1.2, 1.5};
  for (std::size_t i = 0; i < n; ++i) {
    double size = std::round(rng.uniform(40.0, 160.0));
    std::string location = pick(rng, {"rural", "suburb", "downtown"}, {0.30, 0.45, 0.25});
    // established school districts sit in older neighborhoods: the label is
    // drawn first and building age follows a per-class Gaussian
    const bool school_district = rng.uniform() < 0.212;
    double age = std::round(clamp(rng.normal(school_district ? 38.0 : 20.0,
                                             school_district ? 8.0 : 11.0),
                                  0.0, 60.0));
    double renovation = renovation_levels[rng.index(4)];
    double base = real_estate_base_price(location);
    double price =
        std::round(base * size * renovation * (1.0 - 0.004 * age) + rng.normal(0.0, 300.0));
    price = std::max(price, 200.0);

    std::string house_type =
        location == "downtown" ? pick(rng, {"apartment", "townhouse", "detached"}, {0.75, 0.18, 0.07})
                               : pick(rng, {"apartment", "townhouse", "detached"}, {0.40, 0.30, 0.30});
    std::string traffic =
        location == "downtown" ? pick(rng, {"low", "medium", "high"}, {0.05, 0.25, 0.70})
        : location == "suburb" ? pick(rng, {"low", "medium", "high"}, {0.20, 0.55, 0.25})
                               : pick(rng, {"low", "medium", "high"}, {0.60, 0.32, 0.08});

    std::string school = school_district ? "yes" : "no";

    ds.rows.push_back(finish_row(
        schema, {size, location, age, renovation, price, house_type, traffic, school}));
  }
  return ds;
}

// ---- social network --------------------------------------------------------

Schema social_network_schema() {
  Schema s;
  s.attributes = {
      numeric_attr("Age", "User age in years"),
      categorical_attr("Country", "Country of residence", {"US", "UK", "DE", "IN", "BR"}),
      numeric_attr("AccountAgeExponent", "log10 of account age in days"),
      numeric_attr("DailyPosts", "Average posts per day"),
      numeric_attr("FollowingCount", "Number of accounts followed"),
      numeric_attr("FollowersCount", "Number of followers; grows with account age and activity"),
      numeric_attr("AverageLikes", "Average likes per post; tracks follower count"),
      numeric_attr("AverageLikesFromFollowing", "Average likes received from followed accounts"),
      categorical_attr("InfluenceLevel", "Influence tier from 0 (ordinary) to 3 (top)",
                       {"0", "1", "2", "3"}),
  };
  s.label = "InfluenceLevel";
  s.classes = {"0", "1", "2", "3"};
  return s;
}

Dataset generate_social_network(std::size_t n, std::uint64_t seed) {
  const Schema schema = social_network_schema();
  Rng rng(Rng::derive(seed, 53));
  Dataset ds;
  ds.schema = schema;
  ds.rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double age = std::floor(rng.uniform(16.0, 60.0));
    std::string country = pick(rng, {"US", "UK", "DE", "IN", "BR"}, {0.30, 0.15, 0.15, 0.25, 0.15});
    double account_age = rng.uniform(0.5, 3.0);
    double posts = clamp(std::exp(rng.normal(0.5, 0.8)), 0.0, 50.0);
    posts = std::round(posts * 10.0) / 10.0;
    double following = std::round(clamp(std::exp(rng.normal(5.0, 1.0)), 1.0, 5000.0));
    double log_followers = 1.7 * account_age + 0.5 * std::log(1.0 + posts) + rng.normal(0.0, 0.9);
    double followers = std::round(clamp(std::exp(log_followers), 1.0, 2.0e6));
    double avg_likes = std::round(clamp(0.05 * followers * rng.uniform(0.5, 1.5) +
                                        rng.normal(0.0, 2.0), 0.0, 1.0e5));
    double likes_from_following =
        std::round(clamp(0.02 * following * rng.uniform(0.5, 1.5), 0.0, 500.0));

    // influence tiers cut on log-follower count; constants calibrated for
    // shares near 78.9 / 8.6 / 5.5 / 7.0 percent
    std::string level;
    if (log_followers < 4.83) level = "0";
    else if (log_followers < 5.34) level = "1";
    else if (log_followers < 5.78) level = "2";
    else level = "3";

    ds.rows.push_back(finish_row(schema, {age, country, account_age, posts, following, followers,
                                          avg_likes, likes_from_following, level}));
  }
  return ds;
}

}  // namespace

BenchmarkName parse_benchmark_name(const std::string& name) {
  if (name == "consumer_behavior") return BenchmarkName::consumer_behavior;
  if (name == "health_metrics") return BenchmarkName::health_metrics;
  if (name == "real_estate") return BenchmarkName::real_estate;
  if (name == "social_network") return BenchmarkName::social_network;
  throw ConfigError("unknown benchmark dataset: " + name +
                    " (expected consumer_behavior, health_metrics, real_estate or social_network)");
}

std::string benchmark_name_string(BenchmarkName name) {
  switch (name) {
    case BenchmarkName::consumer_behavior: return "consumer_behavior";
    case BenchmarkName::health_metrics: return "health_metrics";
    case BenchmarkName::real_estate: return "real_estate";
    case BenchmarkName::social_network: return "social_network";
  }
  return "?";
}

Schema benchmark_schema(BenchmarkName name) {
  switch (name) {
    case BenchmarkName::consumer_behavior: return consumer_behavior_schema();
    case BenchmarkName::health_metrics: return health_metrics_schema();
    case BenchmarkName::real_estate: return real_estate_schema();
    case BenchmarkName::social_network: return social_network_schema();
  }
  throw ConfigError("unknown benchmark dataset");
}

Dataset generate_benchmark(BenchmarkName name, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("benchmark generator needs n >= 1");
  switch (name) {
    case BenchmarkName::consumer_behavior: return generate_consumer_behavior(n, seed);
    case BenchmarkName::health_metrics: return generate_health_metrics(n, seed);
    case BenchmarkName::real_estate: return generate_real_estate(n, seed);
    case BenchmarkName::social_network: return generate_social_network(n, seed);
  }
  throw ConfigError("unknown benchmark dataset");
}

Dataset generate_benchmark(const std::string& name, std::size_t n, std::uint64_t seed) {
  return generate_benchmark(parse_benchmark_name(name), n, seed);
}

}  // namespace rddg
