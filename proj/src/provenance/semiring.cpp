#include "nesy/provenance/semiring.h"

#include "nesy/error.h"
#include "nesy/provenance/wmc.h"
#include "nesy/value.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace nesy::provenance {

namespace {

constexpr double kScalarTolerance = 1e-12;

std::size_t parseK(std::string_view digits, std::string_view text) {
    std::size_t k = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || k == 0) {
        throw Error(ErrorCode::ConfigError, "semiring '" + std::string(text) + "' needs a positive integer k",
                std::string(text));
    }
    return k;
}

const ProofSet& proofsOf(const Tag& t) {
    return std::get<ProofSet>(t);
}

}  // namespace

SemiringSpec SemiringSpec::parse(std::string_view text) {
    if (text == "bool" || text == "boolean") {
        return boolean();
    }
    if (text == "maxmin") {
        return maxMin();
    }
    if (text == "addmult") {
        return addMult();
    }
    if (text == "exact") {
        return topKGrad(kUnboundedK);
    }
    if (text.starts_with("topkgrad:")) {
        return topKGrad(parseK(text.substr(9), text));
    }
    if (text.starts_with("topk:")) {
        return topKGrad(parseK(text.substr(5), text));
    }
    if (text.starts_with("topkproofs:")) {
        return topK(parseK(text.substr(11), text));
    }
    throw Error(ErrorCode::ConfigError, "unknown semiring '" + std::string(text) + "'", std::string(text));
}

std::string SemiringSpec::toString() const {
    auto kText = [&] { return k == kUnboundedK ? std::string("inf") : std::to_string(k); };
    switch (kind) {
    case SemiringKind::Boolean:
        return "bool";
    case SemiringKind::MaxMin:
        return "maxmin";
    case SemiringKind::AddMultProb:
        return "addmult";
    case SemiringKind::TopKProofs:
        return "topkproofs:" + kText();
    case SemiringKind::TopKProofsGrad:
        return k == kUnboundedK ? "exact" : "topk:" + kText();
    }
    return "?";
}

void checkSpec(const SemiringSpec& spec) {
    if (spec.proofBased() && spec.k == 0) {
        throw Error(ErrorCode::ConfigError, "top-k semiring requires k >= 1", "k");
    }
}

Tag sr_zero(const SemiringSpec& spec) {
    switch (spec.kind) {
    case SemiringKind::Boolean:
        return false;
    case SemiringKind::MaxMin:
    case SemiringKind::AddMultProb:
        return 0.0;
    default:
        return ProofSet();
    }
}

Tag sr_one(const SemiringSpec& spec) {
    switch (spec.kind) {
    case SemiringKind::Boolean:
        return true;
    case SemiringKind::MaxMin:
    case SemiringKind::AddMultProb:
        return 1.0;
    default:
        return ProofSet::certain();
    }
}

Tag sr_add(const SemiringSpec& spec, const Tag& a, const Tag& b, const FactWeights& weights) {
    switch (spec.kind) {
    case SemiringKind::Boolean:
        return std::get<bool>(a) || std::get<bool>(b);
    case SemiringKind::MaxMin:
        return std::max(std::get<double>(a), std::get<double>(b));
    case SemiringKind::AddMultProb: {
        double x = std::get<double>(a);
        double y = std::get<double>(b);
        return x + y - x * y;
    }
    default: {
        const auto& pa = proofsOf(a).proofs();
        const auto& pb = proofsOf(b).proofs();
        if (pb.empty()) {
            return a;
        }
        if (pa.empty()) {
            return b;
        }
        std::vector<Proof> all;
        all.reserve(pa.size() + pb.size());
        all.insert(all.end(), pa.begin(), pa.end());
        all.insert(all.end(), pb.begin(), pb.end());
        return ProofSet::from(std::move(all), spec.k, weights);
    }
    }
}

Tag sr_mul(const SemiringSpec& spec, const Tag& a, const Tag& b, const FactWeights& weights) {
    switch (spec.kind) {
    case SemiringKind::Boolean:
        return std::get<bool>(a) && std::get<bool>(b);
    case SemiringKind::MaxMin:
        return std::min(std::get<double>(a), std::get<double>(b));
    case SemiringKind::AddMultProb:
        return std::get<double>(a) * std::get<double>(b);
    default: {
        std::vector<Proof> all;
        for (const auto& x : proofsOf(a).proofs()) {
            for (const auto& y : proofsOf(b).proofs()) {
                if (auto joined = joinProofs(x, y, weights)) {
                    all.push_back(std::move(*joined));
                }
            }
        }
        return ProofSet::from(std::move(all), spec.k, weights);
    }
    }
}

Tag sr_sum(const SemiringSpec& spec, const std::vector<Tag>& tags, const FactWeights& weights) {
    if (!spec.proofBased()) {
        Tag acc = sr_zero(spec);
        for (const auto& t : tags) {
            acc = sr_add(spec, acc, t, weights);
        }
        return acc;
    }
    std::vector<Proof> all;
    for (const auto& t : tags) {
        const auto& ps = proofsOf(t).proofs();
        all.insert(all.end(), ps.begin(), ps.end());
    }
    return ProofSet::from(std::move(all), spec.k, weights);
}

Tag sr_fact(const SemiringSpec& spec, FactId f, const FactWeights& weights) {
    switch (spec.kind) {
    case SemiringKind::Boolean:
        return weights.prob(f) > 0.5;
    case SemiringKind::MaxMin:
    case SemiringKind::AddMultProb:
        return weights.prob(f);
    default:
        return ProofSet::single(f);
    }
}

bool sr_equal(const SemiringSpec& spec, const Tag& a, const Tag& b) {
    switch (spec.kind) {
    case SemiringKind::Boolean:
        return std::get<bool>(a) == std::get<bool>(b);
    case SemiringKind::MaxMin:
    case SemiringKind::AddMultProb:
        return std::abs(std::get<double>(a) - std::get<double>(b)) <= kScalarTolerance;
    default:
        return proofsOf(a) == proofsOf(b);
    }
}

bool sr_is_zero(const SemiringSpec& spec, const Tag& t) {
    switch (spec.kind) {
    case SemiringKind::Boolean:
        return !std::get<bool>(t);
    case SemiringKind::MaxMin:
    case SemiringKind::AddMultProb:
        return std::get<double>(t) == 0.0;
    default:
        return proofsOf(t).empty();
    }
}

double sr_probability(const Tag& t, const FactWeights& weights) {
    if (const bool* b = std::get_if<bool>(&t)) {
        return *b ? 1.0 : 0.0;
    }
    if (const double* d = std::get_if<double>(&t)) {
        return *d;
    }
    return wmc(proofsOf(t), weights);
}

std::string tagToString(const Tag& t) {
    if (const bool* b = std::get_if<bool>(&t)) {
        return *b ? "true" : "false";
    }
    if (const double* d = std::get_if<double>(&t)) {
        return formatFloat(*d);
    }
    std::ostringstream os;
    os << "{";
    bool firstProof = true;
    for (const auto& p : proofsOf(t).proofs()) {
        os << (firstProof ? "" : ", ") << "{";
        firstProof = false;
        for (std::size_t i = 0; i < p.facts.size(); ++i) {
            os << (i ? "," : "") << p.facts[i];
        }
        os << "}";
    }
    os << "}";
    return os.str();
}

}  // namespace nesy::provenance
