// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <string>
#include <vector>

#include "quickrest/spec_engine.hpp"

namespace quickrest {

/// Splittable deterministic generator (splitmix64). The same seed yields the
/// same stream; split() and derive() give independent reproducible streams.
class Rng {
  public:
    explicit Rng(uint64_t seed);

    static Rng derive(uint64_t seed, std::initializer_list<uint64_t> stream);
    static uint64_t hash_string(const std::string& s);

    uint64_t next_u64();
    double next_double();                       // [0, 1)
    uint64_t below(uint64_t bound);             // uniform in [0, bound); bound >= 1
    int64_t in_range(int64_t lo, int64_t hi);   // uniform inclusive
    bool bernoulli(double p);
    Rng split();

  private:
    Rng(uint64_t state, uint64_t gamma) : state_(state), gamma_(gamma) {}

    uint64_t state_;
    uint64_t gamma_;
};

/// Caps string lengths, array lengths and integer magnitudes.
struct Size {
    uint32_t value = 0;
};

struct GeneratorConfig {
    double string_mix = 0.5;       // P(any-string); 1-p draws alphanumeric strings
    uint32_t charset_max = 255;    // code point cap for any-string generation
    double int_mode = 0.5;         // P(nat-int, >= 0); 1-p draws any signed int
    double omit_required_prob = 0.0;
    double out_of_range_prob = 0.0;
    uint32_t max_size = 200;

    void validate() const;  // throws ConfigError when a probability leaves [0,1]
};

/// Generate a value conforming to the spec (when mutation probabilities are
/// zero). Pattern-constrained specs retry against the pattern and throw
/// GenerationExhaustedError when the retry budget runs out.
Json gen_value(const SpecRegistry& registry, const SpecRef& spec, const GeneratorConfig& cfg,
               Rng& rng, Size size);

/// Smallest deterministic conforming value for a spec ("", 0, [], required
/// keys only, ...). Used as the neutral baseline when a parameter is held
/// fixed.
Json minimal_value(const SpecRegistry& registry, const SpecRef& spec);

struct MutationNote {
    std::string param;
    std::string kind;  // "omitted-required", "out-of-range", "type-substitution"

    bool operator==(const MutationNote&) const = default;
};

struct ParamAssignment {
    std::map<std::string, Json> values;
    std::vector<MutationNote> mutations;
};

/// Apply specification mutations: drop required parameters with
/// omit_required_prob, push numeric values out of their documented range (or
/// substitute a different JSON type) with out_of_range_prob.
ParamAssignment mutate_assignment(const std::vector<ParameterSpec>& params, ParamAssignment a,
                                  const GeneratorConfig& cfg, Rng& rng);

/// Schema knowledge shrinking needs: which object keys are required, and the
/// shapes of nested values.
struct ShrinkGuide {
    std::vector<std::string> required;                // object values
    std::map<std::string, ShrinkGuide> properties;    // object values
    std::vector<ShrinkGuide> items;                   // array values (0 or 1)

    static ShrinkGuide from_spec(const SpecRegistry& registry, const SpecRef& spec);
};

struct ShrinkResult {
    Json value;
    size_t steps_taken = 0;
    size_t executions = 0;
    bool budget_exhausted = false;
};

/// Greedy first-improvement shrinking over the defined step set (strings:
/// delete/replace one character; numbers: halve toward zero, step toward
/// zero; arrays: drop/shrink one element; objects: drop one non-required
/// key / shrink one value). `still_fails` is consulted for every candidate;
/// the result is a local minimum unless the budget ran out.
ShrinkResult shrink_value(const ShrinkGuide& guide, const Json& failing,
                          const std::function<bool(const Json&)>& still_fails,
                          size_t budget = 1000);

ShrinkResult shrink_value(const SpecRegistry& registry, const SpecRef& spec, const Json& failing,
                          const std::function<bool(const Json&)>& still_fails,
                          size_t budget = 1000);

/// All single-step shrink candidates of a value (used by shrinking and by
/// minimality checks).
std::vector<Json> shrink_candidates(const ShrinkGuide& guide, const Json& value);

struct RunPlan;  // checker.hpp

/// Size for the test at the given zero-based index of a run. Sizes ramp from
/// zero within each iteration and are capped at max_size; later tiers run
/// tier_growth times more tests per iteration and therefore reach larger
/// sizes.
Size size_schedule(uint64_t test_index, const RunPlan& plan, uint32_t max_size);

// UTF-8 helpers shared by generation and shrinking. Invalid bytes decode as
// single code points so arbitrary response data survives a round trip.
std::vector<uint32_t> utf8_decode(const std::string& s);
std::string utf8_encode(const std::vector<uint32_t>& code_points);

}  // namespace quickrest
