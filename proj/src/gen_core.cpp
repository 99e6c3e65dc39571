// SPDX-License-Identifier: Apache-2.0
#include "quickrest/gen_core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <regex>

#include "quickrest/checker.hpp"

namespace quickrest {

namespace {

constexpr uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

uint64_t mix_gamma(uint64_t z) {
    z = (z ^ (z >> 33)) * 0xFF51AFD7ED558CCDull;
    z = (z ^ (z >> 33)) * 0xC4CEB9FE1A85EC53ull;
    z = (z ^ (z >> 33)) | 1ull;
    int transitions = std::popcount(z ^ (z >> 1));
    return transitions < 24 ? z ^ 0xAAAAAAAAAAAAAAAAull : z;
}

constexpr char kAlnum[] = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
constexpr char kHex[] = "0123456789abcdef";
constexpr size_t kPatternRetryBudget = 1000;

}  // namespace

Rng::Rng(uint64_t seed) : state_(seed), gamma_(kGoldenGamma) {}

Rng Rng::derive(uint64_t seed, std::initializer_list<uint64_t> stream) {
    Rng r(seed);
    for (uint64_t v : stream) r.state_ = mix64(r.state_ ^ (v + kGoldenGamma));
    return r;
}

uint64_t Rng::hash_string(const std::string& s) {
    uint64_t h = 0xCBF29CE484222325ull;  // FNV-1a
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

uint64_t Rng::next_u64() {
    state_ += gamma_;
    return mix64(state_);
}

double Rng::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

uint64_t Rng::below(uint64_t bound) {
    if (bound <= 1) return 0;
    return static_cast<uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
}

int64_t Rng::in_range(int64_t lo, int64_t hi) {
    if (hi <= lo) return lo;
    uint64_t span = static_cast<uint64_t>(hi) - static_cast<uint64_t>(lo);
    if (span == UINT64_MAX) return static_cast<int64_t>(next_u64());
    return static_cast<int64_t>(static_cast<uint64_t>(lo) + below(span + 1));
}

bool Rng::bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return next_double() < p;
}

Rng Rng::split() {
    uint64_t s = next_u64();
    uint64_t g = mix_gamma(next_u64());
    return Rng(s, g);
}

void GeneratorConfig::validate() const {
    auto check = [](double p, const char* name) {
        if (!(p >= 0.0 && p <= 1.0))
            throw ConfigError(std::string(name) + " must be within [0,1]");
    };
    check(string_mix, "string-mix");
    check(int_mode, "int-mode");
    check(omit_required_prob, "omit-required-prob");
    check(out_of_range_prob, "out-of-range-prob");
}

std::vector<uint32_t> utf8_decode(const std::string& s) {
    std::vector<uint32_t> out;
    size_t i = 0;
    while (i < s.size()) {
        unsigned char b = s[i];
        size_t len = b < 0x80 ? 1 : (b >> 5) == 0x6 ? 2 : (b >> 4) == 0xE ? 3
                     : (b >> 3) == 0x1E            ? 4
                                                   : 0;
        if (len == 0 || i + len > s.size()) {
            out.push_back(b);  // invalid lead byte: keep as-is
            ++i;
            continue;
        }
        uint32_t cp = len == 1 ? b : b & (0x7F >> len);
        bool valid = true;
        for (size_t k = 1; k < len; ++k) {
            unsigned char cont = s[i + k];
            if ((cont & 0xC0) != 0x80) {
                valid = false;
                break;
            }
            cp = (cp << 6) | (cont & 0x3F);
        }
        if (!valid) {
            out.push_back(b);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

std::string utf8_encode(const std::vector<uint32_t>& code_points) {
    std::string out;
    for (uint32_t cp : code_points) {
        if (cp < 0x80) {
            out += static_cast<char>(cp);
        } else if (cp < 0x800) {
            out += static_cast<char>(0xC0 | (cp >> 6));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else if (cp < 0x10000) {
            out += static_cast<char>(0xE0 | (cp >> 12));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else {
            out += static_cast<char>(0xF0 | (cp >> 18));
            out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        }
    }
    return out;
}

namespace {

std::string gen_basic_string(const GeneratorConfig& cfg, Rng& rng, Size size) {
    uint64_t len = rng.below(static_cast<uint64_t>(size.value) + 1);
    bool any_string = rng.bernoulli(cfg.string_mix);
    std::vector<uint32_t> cps;
    cps.reserve(len);
    for (uint64_t i = 0; i < len; ++i) {
        if (any_string) {
            uint32_t cp = static_cast<uint32_t>(rng.below(cfg.charset_max + 1ull));
            if (cp >= 0xD800 && cp <= 0xDFFF) cp -= 0x800;  // avoid surrogates
            cps.push_back(cp);
        } else {
            cps.push_back(static_cast<uint32_t>(kAlnum[rng.below(62)]));
        }
    }
    return utf8_encode(cps);
}

std::string gen_uuid(Rng& rng) {
    static constexpr size_t kGroups[] = {8, 4, 4, 4, 12};
    std::string out;
    for (size_t g = 0; g < 5; ++g) {
        if (g > 0) out += '-';
        for (size_t i = 0; i < kGroups[g]; ++i) out += kHex[rng.below(16)];
    }
    return out;
}

std::string gen_date_time(Rng& rng) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                  static_cast<int>(1970 + rng.below(130)), static_cast<int>(1 + rng.below(12)),
                  static_cast<int>(1 + rng.below(28)), static_cast<int>(rng.below(24)),
                  static_cast<int>(rng.below(60)), static_cast<int>(rng.below(60)));
    return buf;
}

int64_t to_int_floor(double d) { return static_cast<int64_t>(std::floor(d)); }
int64_t to_int_ceil(double d) { return static_cast<int64_t>(std::ceil(d)); }

Json gen_from(const SpecRegistry& registry, const CompiledSpec& spec, const GeneratorConfig& cfg,
              Rng& rng, Size size) {
    switch (spec.kind) {
        case SpecKind::Alias:
            return gen_from(registry, registry.get(spec.target_spec), cfg, rng, size);
        case SpecKind::Enum:
            return spec.enum_values[rng.below(spec.enum_values.size())];
        case SpecKind::Array: {
            uint64_t len = rng.below(static_cast<uint64_t>(size.value) + 1);
            const CompiledSpec& items = registry.get(spec.items_spec);
            Json out = Json::array();
            for (uint64_t i = 0; i < len; ++i)
                out.push_back(gen_from(registry, items, cfg, rng, size));
            return out;
        }
        case SpecKind::Object: {
            Json out = Json::object();
            for (const auto& [prop, sub_name] : spec.object_properties) {
                bool required = std::find(spec.required.begin(), spec.required.end(), prop) !=
                                spec.required.end();
                if (!required && !rng.bernoulli(0.5)) continue;
                out[prop] = gen_from(registry, registry.get(sub_name), cfg, rng, size);
            }
            return out;
        }
        case SpecKind::Primitive:
            break;
    }

    switch (spec.type) {
        case JsonType::String: {
            if (spec.format == "uuid") return gen_uuid(rng);
            if (spec.format == "date-time") return gen_date_time(rng);
            if (spec.pattern) {
                std::regex re;
                try {
                    re = std::regex(*spec.pattern, std::regex::ECMAScript);
                } catch (const std::regex_error&) {
                    throw GenerationExhaustedError("unsupported pattern on spec " + spec.name +
                                                   ": /" + *spec.pattern + "/");
                }
                for (size_t attempt = 0; attempt < kPatternRetryBudget; ++attempt) {
                    std::string candidate = gen_basic_string(cfg, rng, size);
                    if (std::regex_search(candidate, re)) return candidate;
                }
                throw GenerationExhaustedError("no value matching /" + *spec.pattern +
                                               "/ within " +
                                               std::to_string(kPatternRetryBudget) + " tries");
            }
            return gen_basic_string(cfg, rng, size);
        }
        case JsonType::Integer: {
            int64_t cap = size.value;
            if (spec.minimum && spec.maximum)
                return rng.in_range(to_int_ceil(*spec.minimum), to_int_floor(*spec.maximum));
            if (spec.minimum) {
                int64_t lo = to_int_ceil(*spec.minimum);
                return rng.in_range(lo, lo + cap);
            }
            if (spec.maximum) {
                int64_t hi = to_int_floor(*spec.maximum);
                return rng.in_range(hi - cap, hi);
            }
            return rng.bernoulli(cfg.int_mode) ? rng.in_range(0, cap)
                                               : rng.in_range(-cap, cap);
        }
        case JsonType::Number: {
            double cap = size.value;
            double lo, hi;
            if (spec.minimum && spec.maximum) {
                lo = *spec.minimum;
                hi = *spec.maximum;
            } else if (spec.minimum) {
                lo = *spec.minimum;
                hi = lo + cap;
            } else if (spec.maximum) {
                hi = *spec.maximum;
                lo = hi - cap;
            } else if (rng.bernoulli(cfg.int_mode)) {
                lo = 0.0;
                hi = cap;
            } else {
                lo = -cap;
                hi = cap;
            }
            return lo + rng.next_double() * (hi - lo);
        }
        case JsonType::Boolean:
            return rng.below(2) == 1;
    }
    throw Error("unreachable spec type");
}

}  // namespace

Json gen_value(const SpecRegistry& registry, const SpecRef& spec, const GeneratorConfig& cfg,
               Rng& rng, Size size) {
    return gen_from(registry, registry.get(spec.name), cfg, rng, size);
}

namespace {

Json minimal_from(const SpecRegistry& registry, const CompiledSpec& spec) {
    switch (spec.kind) {
        case SpecKind::Alias:
            return minimal_from(registry, registry.get(spec.target_spec));
        case SpecKind::Enum:
            return spec.enum_values.front();
        case SpecKind::Array:
            return Json::array();
        case SpecKind::Object: {
            Json out = Json::object();
            for (const auto& req : spec.required) {
                for (const auto& [prop, sub_name] : spec.object_properties) {
                    if (prop == req) out[prop] = minimal_from(registry, registry.get(sub_name));
                }
            }
            return out;
        }
        case SpecKind::Primitive:
            break;
    }
    switch (spec.type) {
        case JsonType::String: {
            if (spec.format == "uuid") return "00000000-0000-4000-8000-000000000000";
            if (spec.format == "date-time") return "1970-01-01T00:00:00Z";
            if (spec.pattern) {
                std::regex re(*spec.pattern, std::regex::ECMAScript);
                for (const char* candidate : {"", "a", "0", "aa", "00", "a0"}) {
                    if (std::regex_search(std::string(candidate), re)) return candidate;
                }
                GeneratorConfig cfg;
                cfg.string_mix = 0.0;
                Rng rng(0);
                return gen_from(registry, spec, cfg, rng, Size{16});
            }
            return "";
        }
        case JsonType::Integer: {
            int64_t v = 0;
            if (spec.minimum && v < to_int_ceil(*spec.minimum)) v = to_int_ceil(*spec.minimum);
            if (spec.maximum && v > to_int_floor(*spec.maximum)) v = to_int_floor(*spec.maximum);
            return v;
        }
        case JsonType::Number: {
            double v = 0.0;
            if (spec.minimum && v < *spec.minimum) v = *spec.minimum;
            if (spec.maximum && v > *spec.maximum) v = *spec.maximum;
            return v;
        }
        case JsonType::Boolean:
            return false;
    }
    throw Error("unreachable spec type");
}

}  // namespace

Json minimal_value(const SpecRegistry& registry, const SpecRef& spec) {
    return minimal_from(registry, registry.get(spec.name));
}

ParamAssignment mutate_assignment(const std::vector<ParameterSpec>& params, ParamAssignment a,
                                  const GeneratorConfig& cfg, Rng& rng) {
    for (const auto& param : params) {
        auto it = a.values.find(param.name);
        if (it == a.values.end()) continue;
        if (param.required && rng.bernoulli(cfg.omit_required_prob)) {
            a.values.erase(it);
            a.mutations.push_back({param.name, "omitted-required"});
            continue;
        }
        if (!rng.bernoulli(cfg.out_of_range_prob)) continue;
        const DataSchema& schema = param.schema;
        bool numeric = schema.kind == DataSchema::Kind::Primitive &&
                       (schema.type == JsonType::Integer || schema.type == JsonType::Number);
        if (numeric && (schema.minimum || schema.maximum)) {
            bool go_high = schema.maximum && (!schema.minimum || rng.bernoulli(0.5));
            int64_t offset = 1 + static_cast<int64_t>(rng.below(10));
            if (go_high) {
                double v = *schema.maximum + static_cast<double>(offset);
                it->second = schema.type == JsonType::Integer
                                 ? Json(to_int_floor(*schema.maximum) + offset)
                                 : Json(v);
            } else {
                double v = *schema.minimum - static_cast<double>(offset);
                it->second = schema.type == JsonType::Integer
                                 ? Json(to_int_ceil(*schema.minimum) - offset)
                                 : Json(v);
            }
            a.mutations.push_back({param.name, "out-of-range"});
        } else {
            // Substitute a value of a different JSON type.
            if (it->second.is_string()) it->second = Json(static_cast<int64_t>(42));
            else it->second = Json("out-of-type");
            a.mutations.push_back({param.name, "type-substitution"});
        }
    }
    return a;
}

ShrinkGuide ShrinkGuide::from_spec(const SpecRegistry& registry, const SpecRef& spec) {
    const CompiledSpec& compiled = registry.get(spec.name);
    ShrinkGuide guide;
    switch (compiled.kind) {
        case SpecKind::Alias:
            return from_spec(registry, SpecRef{compiled.target_spec, SpecKind::Alias});
        case SpecKind::Array:
            guide.items.push_back(from_spec(registry, SpecRef{compiled.items_spec}));
            return guide;
        case SpecKind::Object:
            guide.required = compiled.required;
            for (const auto& [prop, sub_name] : compiled.object_properties)
                guide.properties.emplace(prop, from_spec(registry, SpecRef{sub_name}));
            return guide;
        case SpecKind::Enum:
        case SpecKind::Primitive:
            return guide;
    }
    return guide;
}

std::vector<Json> shrink_candidates(const ShrinkGuide& guide, const Json& value) {
    std::vector<Json> out;
    if (value.is_string()) {
        std::vector<uint32_t> cps = utf8_decode(value.get<std::string>());
        for (size_t i = 0; i < cps.size(); ++i) {
            std::vector<uint32_t> shorter = cps;
            shorter.erase(shorter.begin() + static_cast<ptrdiff_t>(i));
            out.push_back(utf8_encode(shorter));
        }
        // Replacements only target characters that are not already a
        // replacement character, so repeated steps always make progress.
        for (uint32_t replacement : {uint32_t('a'), uint32_t('0')}) {
            for (size_t i = 0; i < cps.size(); ++i) {
                if (cps[i] == 'a' || cps[i] == '0') continue;
                std::vector<uint32_t> replaced = cps;
                replaced[i] = replacement;
                out.push_back(utf8_encode(replaced));
            }
        }
        return out;
    }
    if (value.is_number_integer() || value.is_number_unsigned()) {
        int64_t n = value.get<int64_t>();
        int64_t half = n / 2;
        if (half != n) out.push_back(half);
        if (n != 0) {
            int64_t stepped = n > 0 ? n - 1 : n + 1;
            if (stepped != half) out.push_back(stepped);
        }
        return out;
    }
    if (value.is_number_float()) {
        double d = value.get<double>();
        if (std::isfinite(d)) {
            if (d / 2 != d) out.push_back(d / 2);
            if (std::trunc(d) != d) out.push_back(std::trunc(d));
        }
        return out;
    }
    if (value.is_array()) {
        const ShrinkGuide* items = guide.items.empty() ? nullptr : &guide.items.front();
        static const ShrinkGuide kEmpty;
        for (size_t i = 0; i < value.size(); ++i) {
            Json shorter = value;
            shorter.erase(i);
            out.push_back(std::move(shorter));
        }
        for (size_t i = 0; i < value.size(); ++i) {
            for (Json& cand : shrink_candidates(items ? *items : kEmpty, value[i])) {
                Json replaced = value;
                replaced[i] = std::move(cand);
                out.push_back(std::move(replaced));
            }
        }
        return out;
    }
    if (value.is_object()) {
        static const ShrinkGuide kEmpty;
        for (auto it = value.begin(); it != value.end(); ++it) {
            bool required = std::find(guide.required.begin(), guide.required.end(), it.key()) !=
                            guide.required.end();
            if (required) continue;
            Json dropped = value;
            dropped.erase(it.key());
            out.push_back(std::move(dropped));
        }
        for (auto it = value.begin(); it != value.end(); ++it) {
            auto sub = guide.properties.find(it.key());
            const ShrinkGuide& sub_guide = sub == guide.properties.end() ? kEmpty : sub->second;
            for (Json& cand : shrink_candidates(sub_guide, it.value())) {
                Json replaced = value;
                replaced[it.key()] = std::move(cand);
                out.push_back(std::move(replaced));
            }
        }
        return out;
    }
    return out;  // booleans, null: no defined steps
}

ShrinkResult shrink_value(const ShrinkGuide& guide, const Json& failing,
                          const std::function<bool(const Json&)>& still_fails, size_t budget) {
    ShrinkResult result;
    result.value = failing;
    bool improved = true;
    while (improved) {
        improved = false;
        for (Json& candidate : shrink_candidates(guide, result.value)) {
            if (result.executions >= budget) {
                result.budget_exhausted = true;
                return result;
            }
            ++result.executions;
            if (still_fails(candidate)) {
                result.value = std::move(candidate);
                ++result.steps_taken;
                improved = true;
                break;
            }
        }
    }
    return result;
}

ShrinkResult shrink_value(const SpecRegistry& registry, const SpecRef& spec, const Json& failing,
                          const std::function<bool(const Json&)>& still_fails, size_t budget) {
    return shrink_value(ShrinkGuide::from_spec(registry, spec), failing, still_fails, budget);
}

Size size_schedule(uint64_t test_index, const RunPlan& plan, uint32_t max_size) {
    uint64_t remaining = test_index;
    uint64_t per_iteration = std::max<uint64_t>(plan.tests_per_iteration, 1);
    uint64_t iterations = std::max<uint64_t>(plan.iterations, 1);
    for (uint32_t tier = 0;; ++tier) {
        uint64_t tier_total = per_iteration * iterations;
        if (remaining < tier_total || tier + 1 >= std::max<uint32_t>(plan.tiers, 1)) {
            uint64_t within_iteration = remaining % per_iteration;
            return Size{static_cast<uint32_t>(std::min<uint64_t>(within_iteration, max_size))};
        }
        remaining -= tier_total;
        per_iteration *= std::max<uint64_t>(plan.tier_growth, 1);
    }
}

}  // namespace quickrest
