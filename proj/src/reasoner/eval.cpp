#include "compiled.h"

#include "nesy/error.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <set>
#include <unordered_map>

namespace nesy::reasoner {

namespace {

using logic::CmpOp;
using logic::Literal;
using provenance::sr_equal;
using provenance::sr_fact;
using provenance::sr_is_zero;
using provenance::sr_mul;
using provenance::sr_one;
using provenance::sr_sum;

using Relations = std::map<std::string, TaggedRelation>;
using Entry = std::pair<const Tuple, Tag>;

constexpr std::size_t kMaxRoundsPerStratum = 10000;
const TaggedRelation kEmptyRelation;

/** Hash indexes over the current snapshot, keyed by relation and bound-column mask. */
class IndexCache {
public:
    explicit IndexCache(const Relations& rels) : rels_(rels) {}

    const TaggedRelation& relation(const std::string& name) const {
        auto it = rels_.find(name);
        return it == rels_.end() ? kEmptyRelation : it->second;
    }

    const std::vector<const Entry*>* lookup(const std::string& name, std::uint64_t mask, const Tuple& key) {
        auto& index = indexes_[{name, mask}];
        if (!index.built) {
            for (const auto& e : relation(name).tuples) {
                index.buckets[project(e.first, mask)].push_back(&e);
            }
            index.built = true;
        }
        auto it = index.buckets.find(key);
        return it == index.buckets.end() ? nullptr : &it->second;
    }

    void clear() {
        indexes_.clear();
    }

    static Tuple project(const Tuple& t, std::uint64_t mask) {
        Tuple key;
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (mask & (std::uint64_t{1} << i)) {
                key.push_back(t[i]);
            }
        }
        return key;
    }

private:
    struct Index {
        bool built = false;
        std::unordered_map<Tuple, std::vector<const Entry*>, TupleHash> buckets;
    };
    const Relations& rels_;
    std::map<std::pair<std::string, std::uint64_t>, Index> indexes_;
};

struct Step {
    enum class Kind { Scan, ScanDelta, Filter, Assign, Negation };
    Kind kind = Kind::Scan;
    std::size_t lit = 0;
    std::uint64_t mask = 0;
    int assignVar = 0;
    const CExpr* assignFrom = nullptr;
};

bool lone(const CExpr& e) {
    return e.kind == logic::Expr::Kind::Variable;
}

/**
 * Join of one rule body against the snapshot. Literal order: an optional
 * delta literal first, then repeatedly every guard or negation whose
 * variables are bound, then the smallest remaining positive relation.
 */
class RuleJoin {
public:
    using Emit = std::function<void(const std::vector<Value>&, const std::vector<const Tag*>&)>;

    RuleJoin(const CRule& rule, IndexCache& cache) : rule_(rule), cache_(cache) {
        binding_.resize(rule.varNames.size());
        bound_.assign(rule.varNames.size(), false);
        tags_.assign(rule.body.size(), nullptr);
    }

    /** Pre-binds the head to `tuple`; false when the head cannot match it. */
    bool bindHead(const Tuple& tuple) {
        for (std::size_t i = 0; i < rule_.head.size(); ++i) {
            const CTerm& t = rule_.head[i];
            if (t.constant) {
                if (!(t.value == tuple[i])) {
                    return false;
                }
            } else if (bound_[static_cast<std::size_t>(t.var)]) {
                if (!(binding_[static_cast<std::size_t>(t.var)] == tuple[i])) {
                    return false;
                }
            } else {
                binding_[static_cast<std::size_t>(t.var)] = tuple[i];
                bound_[static_cast<std::size_t>(t.var)] = true;
            }
        }
        return true;
    }

    void run(std::optional<std::size_t> deltaLit, const std::vector<const Entry*>* delta, const Emit& emit) {
        delta_ = delta;
        emit_ = &emit;
        plan(deltaLit);
        exec(0);
    }

private:
    void plan(std::optional<std::size_t> deltaLit) {
        steps_.clear();
        std::vector<bool> b = bound_;
        std::vector<bool> done(rule_.body.size(), false);
        auto allBound = [&](const std::vector<int>& vars) {
            return std::all_of(vars.begin(), vars.end(), [&](int v) { return b[static_cast<std::size_t>(v)]; });
        };
        auto exprBound = [&](const CExpr& e) {
            std::vector<int> vars;
            collect(e, vars);
            return allBound(vars);
        };
        auto scan = [&](std::size_t i, Step::Kind kind) {
            Step s;
            s.kind = kind;
            s.lit = i;
            const auto& args = rule_.body[i].args;
            for (std::size_t c = 0; c < args.size(); ++c) {
                if (args[c].constant || (args[c].var != kWildcard && b[static_cast<std::size_t>(args[c].var)])) {
                    s.mask |= std::uint64_t{1} << c;
                }
            }
            for (int v : rule_.body[i].vars) {
                b[static_cast<std::size_t>(v)] = true;
            }
            done[i] = true;
            steps_.push_back(s);
        };
        if (deltaLit) {
            scan(*deltaLit, Step::Kind::ScanDelta);
        }
        while (true) {
            bool progress = true;
            while (progress) {
                progress = false;
                for (std::size_t i = 0; i < rule_.body.size(); ++i) {
                    const CLiteral& lit = rule_.body[i];
                    if (done[i] || lit.kind == Literal::Kind::Positive) {
                        continue;
                    }
                    Step s;
                    s.lit = i;
                    if (allBound(lit.vars)) {
                        s.kind = lit.kind == Literal::Kind::Negative ? Step::Kind::Negation : Step::Kind::Filter;
                        if (s.kind == Step::Kind::Negation) {
                            for (std::size_t c = 0; c < lit.args.size(); ++c) {
                                if (lit.args[c].constant || lit.args[c].var != kWildcard) {
                                    s.mask |= std::uint64_t{1} << c;
                                }
                            }
                        }
                    } else if (lit.kind == Literal::Kind::Guard && lit.op == CmpOp::Eq) {
                        if (lone(lit.lhs) && !b[static_cast<std::size_t>(lit.lhs.var)] && exprBound(lit.rhs)) {
                            s.kind = Step::Kind::Assign;
                            s.assignVar = lit.lhs.var;
                            s.assignFrom = &lit.rhs;
                        } else if (lone(lit.rhs) && !b[static_cast<std::size_t>(lit.rhs.var)] && exprBound(lit.lhs)) {
                            s.kind = Step::Kind::Assign;
                            s.assignVar = lit.rhs.var;
                            s.assignFrom = &lit.lhs;
                        } else {
                            continue;
                        }
                        b[static_cast<std::size_t>(s.assignVar)] = true;
                    } else {
                        continue;
                    }
                    done[i] = true;
                    steps_.push_back(s);
                    progress = true;
                }
            }
            std::optional<std::size_t> best;
            std::size_t bestSize = 0;
            for (std::size_t i = 0; i < rule_.body.size(); ++i) {
                if (done[i] || rule_.body[i].kind != Literal::Kind::Positive) {
                    continue;
                }
                std::size_t size = cache_.relation(rule_.body[i].relation).tuples.size();
                if (!best || size < bestSize) {
                    best = i;
                    bestSize = size;
                }
            }
            if (!best) {
                break;
            }
            scan(*best, Step::Kind::Scan);
        }
        if (std::find(done.begin(), done.end(), false) != done.end()) {
            throw Error(ErrorCode::UnboundGuardVariable, "cannot schedule every literal of " + rule_.text, rule_.text);
        }
    }

    static void collect(const CExpr& e, std::vector<int>& vars) {
        if (e.kind == logic::Expr::Kind::Variable) {
            vars.push_back(e.var);
        }
        for (const auto& op : e.operands) {
            collect(op, vars);
        }
    }

    void exec(std::size_t stepIdx) {
        if (stepIdx == steps_.size()) {
            (*emit_)(binding_, tags_);
            return;
        }
        const Step& s = steps_[stepIdx];
        const CLiteral& lit = rule_.body[s.lit];
        switch (s.kind) {
        case Step::Kind::ScanDelta:
            for (const Entry* e : *delta_) {
                tryEntry(s, lit, *e, stepIdx);
            }
            break;
        case Step::Kind::Scan:
            if (s.mask == 0) {
                for (const auto& e : cache_.relation(lit.relation).tuples) {
                    tryEntry(s, lit, e, stepIdx);
                }
            } else if (const auto* bucket = cache_.lookup(lit.relation, s.mask, key(lit, s.mask))) {
                for (const Entry* e : *bucket) {
                    tryEntry(s, lit, *e, stepIdx);
                }
            }
            break;
        case Step::Kind::Filter:
            if (compare(evalExpr(lit.lhs, binding_), lit.op, evalExpr(lit.rhs, binding_))) {
                exec(stepIdx + 1);
            }
            break;
        case Step::Kind::Assign: {
            auto v = static_cast<std::size_t>(s.assignVar);
            binding_[v] = evalExpr(*s.assignFrom, binding_);
            bound_[v] = true;
            exec(stepIdx + 1);
            bound_[v] = false;
            break;
        }
        case Step::Kind::Negation: {
            const auto* bucket = s.mask == 0 ? nullptr : cache_.lookup(lit.relation, s.mask, key(lit, s.mask));
            bool present = s.mask == 0 ? !cache_.relation(lit.relation).tuples.empty()
                                       : (bucket != nullptr && !bucket->empty());
            if (!present) {
                exec(stepIdx + 1);
            }
            break;
        }
        }
    }

    Tuple key(const CLiteral& lit, std::uint64_t mask) const {
        Tuple k;
        for (std::size_t c = 0; c < lit.args.size(); ++c) {
            if (mask & (std::uint64_t{1} << c)) {
                k.push_back(lit.args[c].constant ? lit.args[c].value : binding_[static_cast<std::size_t>(lit.args[c].var)]);
            }
        }
        return k;
    }

    void tryEntry(const Step& s, const CLiteral& lit, const Entry& e, std::size_t stepIdx) {
        const Tuple& t = e.first;
        std::vector<int> newly;
        bool ok = true;
        for (std::size_t c = 0; c < lit.args.size() && ok; ++c) {
            const CTerm& a = lit.args[c];
            if (a.constant) {
                ok = a.value == t[c];
            } else if (a.var == kWildcard) {
                continue;
            } else if (bound_[static_cast<std::size_t>(a.var)]) {
                ok = binding_[static_cast<std::size_t>(a.var)] == t[c];
            } else {
                binding_[static_cast<std::size_t>(a.var)] = t[c];
                bound_[static_cast<std::size_t>(a.var)] = true;
                newly.push_back(a.var);
            }
        }
        if (ok) {
            tags_[s.lit] = &e.second;
            exec(stepIdx + 1);
            tags_[s.lit] = nullptr;
        }
        for (int v : newly) {
            bound_[static_cast<std::size_t>(v)] = false;
        }
    }

    const CRule& rule_;
    IndexCache& cache_;
    std::vector<Value> binding_;
    std::vector<bool> bound_;
    std::vector<const Tag*> tags_;
    std::vector<Step> steps_;
    const std::vector<const Entry*>* delta_ = nullptr;
    const RuleJoin::Emit* emit_ = nullptr;
};

Value coerce(const Value& v, ValueType type, const CRule& rule) {
    if (v.type() == type) {
        return v;
    }
    if (type == ValueType::Float && v.type() == ValueType::Int) {
        return Value::real(static_cast<double>(v.asInt()));
    }
    if (type == ValueType::Int && v.type() == ValueType::Float && std::nearbyint(v.asFloat()) == v.asFloat() &&
            std::abs(v.asFloat()) < 9.0e15) {
        return Value::integer(static_cast<std::int64_t>(v.asFloat()));
    }
    throw Error(ErrorCode::TypeMismatch,
            "rule " + rule.text + " derives " + v.toString() + " for a " + std::string(valueTypeName(type)) +
                    " column of '" + rule.headRelation + "'",
            rule.headRelation);
}

Tuple headTuple(const CRule& rule, const std::vector<Value>& binding) {
    Tuple t;
    t.reserve(rule.head.size());
    for (std::size_t i = 0; i < rule.head.size(); ++i) {
        const CTerm& h = rule.head[i];
        t.push_back(coerce(h.constant ? h.value : binding[static_cast<std::size_t>(h.var)], rule.headTypes[i], rule));
    }
    return t;
}

class Evaluator {
public:
    Evaluator(const CompiledProgram& cp, const SemiringSpec& spec, const FactWeights& weights,
            const Relations& base, Relations& rels, EvalStats& stats)
            : cp_(cp), spec_(spec), weights_(weights), base_(base), rels_(rels), stats_(stats), cache_(rels) {
        for (const auto& [name, rel] : rels_) {
            for (const auto& [t, tag] : rel.tuples) {
                domain_.insert(t.begin(), t.end());
            }
        }
    }

    void run() {
        std::size_t rounds = 0;
        for (const auto& ruleIds : cp_.rulesByStratum) {
            if (!ruleIds.empty()) {
                rounds += stratum(ruleIds);
            }
        }
        stats_.iterations = std::max<std::size_t>(rounds, 1);
    }

private:
    using Contributions = std::map<std::string, std::map<Tuple, std::vector<Tag>>>;
    using Delta = std::map<std::string, std::vector<const Entry*>>;

    std::size_t stratum(const std::vector<std::size_t>& ruleIds) {
        Contributions contrib;
        for (std::size_t r : ruleIds) {
            derive(cp_.rules[r], std::nullopt, nullptr, nullptr, contrib);
        }
        Delta delta = apply(contrib);
        std::size_t rounds = 1;
        std::size_t counted = 1;
        while (!delta.empty()) {
            ++rounds;
            // Scalar tags may creep towards their limit for many rounds on cyclic
            // programs; only rounds that add tuples count against the domain bound.
            if (spec_.proofBased() || grew_) {
                ++counted;
            }
            checkBound(rounds, counted);
            std::map<std::string, std::set<Tuple>> affected;
            for (std::size_t r : ruleIds) {
                const CRule& rule = cp_.rules[r];
                for (std::size_t i = 0; i < rule.body.size(); ++i) {
                    const CLiteral& lit = rule.body[i];
                    auto d = delta.find(lit.relation);
                    if (lit.kind != Literal::Kind::Positive || d == delta.end()) {
                        continue;
                    }
                    RuleJoin join(rule, cache_);
                    join.run(i, &d->second, [&](const std::vector<Value>& binding, const std::vector<const Tag*>&) {
                        affected[rule.headRelation].insert(headTuple(rule, binding));
                    });
                }
            }
            contrib.clear();
            for (const auto& [rel, tuples] : affected) {
                auto& slot = contrib[rel];
                for (const auto& t : tuples) {
                    slot[t];
                    for (std::size_t r : ruleIds) {
                        if (cp_.rules[r].headRelation == rel) {
                            derive(cp_.rules[r], std::nullopt, nullptr, &t, contrib);
                        }
                    }
                }
            }
            delta = apply(contrib);
        }
        return rounds;
    }

    void checkBound(std::size_t rounds, std::size_t counted) const {
        double k = spec_.proofBased() && spec_.k != provenance::kUnboundedK ? static_cast<double>(spec_.k) : 1.0;
        double bound = std::pow(static_cast<double>(std::max<std::size_t>(domain_.size(), 1)),
                               static_cast<double>(cp_.maxArity)) *
                       static_cast<double>(std::max<std::size_t>(cp_.rules.size(), 1)) * k;
        if (rounds > kMaxRoundsPerStratum || static_cast<double>(counted) > bound + 1.0) {
            throw Error(ErrorCode::NonTermination,
                    "no fixpoint after " + std::to_string(rounds - 1) + " rounds (bound " +
                            formatFloat(std::min(bound + 1.0, static_cast<double>(kMaxRoundsPerStratum))) + ")");
        }
    }

    void derive(const CRule& rule, std::optional<std::size_t> deltaLit, const std::vector<const Entry*>* delta,
            const Tuple* head, Contributions& contrib) {
        RuleJoin join(rule, cache_);
        if (head && !join.bindHead(*head)) {
            return;
        }
        auto& out = contrib[rule.headRelation];
        join.run(deltaLit, delta, [&](const std::vector<Value>& binding, const std::vector<const Tag*>& tags) {
            std::optional<Tag> acc;
            for (const Tag* t : tags) {
                if (t) {
                    acc = acc ? sr_mul(spec_, *acc, *t, weights_) : *t;
                }
            }
            out[headTuple(rule, binding)].push_back(acc ? std::move(*acc) : sr_one(spec_));
        });
    }

    Delta apply(Contributions& contrib) {
        std::vector<std::pair<std::string, Tuple>> changed;
        grew_ = false;
        for (auto& [rel, tuples] : contrib) {
            auto& target = rels_[rel].tuples;
            const TaggedRelation* baseRel = nullptr;
            if (auto b = base_.find(rel); b != base_.end()) {
                baseRel = &b->second;
            }
            for (auto& [t, tags] : tuples) {
                if (baseRel) {
                    if (auto bt = baseRel->tuples.find(t); bt != baseRel->tuples.end()) {
                        tags.push_back(bt->second);
                    }
                }
                Tag next = sr_sum(spec_, tags, weights_);
                auto cur = target.find(t);
                if (sr_is_zero(spec_, next)) {
                    if (cur != target.end()) {
                        target.erase(cur);
                        changed.emplace_back(rel, t);
                    }
                    continue;
                }
                if (cur == target.end()) {
                    target.emplace(t, std::move(next));
                    domain_.insert(t.begin(), t.end());
                    ++stats_.tuplesDerived;
                    grew_ = true;
                    changed.emplace_back(rel, t);
                } else if (!sr_equal(spec_, cur->second, next)) {
                    cur->second = std::move(next);
                    changed.emplace_back(rel, t);
                } else {
                    cur->second = std::move(next);
                }
            }
        }
        cache_.clear();
        Delta delta;
        for (const auto& [rel, t] : changed) {
            auto& tuples = rels_[rel].tuples;
            if (auto it = tuples.find(t); it != tuples.end()) {
                delta[rel].push_back(&*it);
            }
        }
        return delta;
    }

    const CompiledProgram& cp_;
    const SemiringSpec& spec_;
    const FactWeights& weights_;
    const Relations& base_;
    Relations& rels_;
    EvalStats& stats_;
    IndexCache cache_;
    std::set<Value> domain_;
    bool grew_ = false;
};

bool matches(const logic::Atom& atom, const Tuple& t) {
    std::map<std::string, const Value*> seen;
    for (std::size_t i = 0; i < atom.args.size(); ++i) {
        const auto& a = atom.args[i];
        if (!a.isVariable()) {
            if (!(a.constant == t[i])) {
                return false;
            }
        } else if (!a.isWildcard()) {
            auto [it, fresh] = seen.emplace(a.variable, &t[i]);
            if (!fresh && !(*it->second == t[i])) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace

EvalContext::EvalContext(std::shared_ptr<const CompiledProgram> compiled, SemiringSpec spec)
        : compiled_(std::move(compiled)), spec_(spec) {
    provenance::checkSpec(spec_);
}

const logic::ValidatedProgram& EvalContext::program() const {
    return compiled_->program;
}

const TaggedRelation& EvalContext::relation(const std::string& name) const {
    program().relation(name);
    auto it = relations_.find(name);
    return it == relations_.end() ? kEmptyRelation : it->second;
}

const logic::ProbSlot& EvalContext::slotOf(FactId f) const {
    return program().program.factGroups.at(f.group).members.at(f.member).slot;
}

FactWeights bindWeights(const logic::Program& program, const NeuralOutputs& outputs) {
    const auto& groups = program.factGroups;
    for (const auto& [head, probs] : outputs) {
        for (std::size_t i = 0; i < probs.size(); ++i) {
            if (!(probs[i] >= 0.0)) {
                throw Error(ErrorCode::NegativeProbability,
                        "head '" + head + "' output " + std::to_string(i) + " is " + formatFloat(probs[i]), head);
            }
        }
    }
    FactWeights weights;
    for (const auto& g : groups) {
        provenance::GroupWeights gw;
        gw.kind = g.kind;
        for (const auto& m : g.members) {
            const auto& slot = m.slot;
            if (slot.kind == logic::ProbSlot::Kind::Constant) {
                gw.probs.push_back(slot.probability);
                continue;
            }
            auto it = outputs.find(slot.head);
            if (it == outputs.end()) {
                throw Error(ErrorCode::MissingHead, "no output supplied for neural head '" + slot.head + "'",
                        slot.head, slot.pos.line, slot.pos.column);
            }
            if (slot.index >= it->second.size()) {
                throw Error(ErrorCode::IndexOutOfRange,
                        "neural head '" + slot.head + "' has " + std::to_string(it->second.size()) +
                                " outputs, slot asks for index " + std::to_string(slot.index),
                        slot.head, slot.pos.line, slot.pos.column);
            }
            double p = it->second[slot.index];
            if (g.kind == logic::FactGroupKind::Independent && p > 1.0) {
                throw Error(ErrorCode::InvalidProbability,
                        "neural head '" + slot.head + "' gives probability " + formatFloat(p), slot.head,
                        slot.pos.line, slot.pos.column);
            }
            gw.probs.push_back(p);
        }
        if (g.kind == logic::FactGroupKind::CategoricalAD) {
            double total = 0;
            for (double p : gw.probs) {
                total += p;
            }
            if (total > 0 && std::abs(total - 1.0) > 1e-6) {
                for (double& p : gw.probs) {
                    p /= total;
                }
            }
        }
        weights.groups.push_back(std::move(gw));
    }
    return weights;
}

void seed_facts(EvalContext& ctx, const NeuralOutputs& outputs) {
    const auto& groups = ctx.program().program.factGroups;
    ctx.weights_ = bindWeights(ctx.program().program, outputs);

    const auto& spec = ctx.spec_;
    std::map<std::string, std::map<Tuple, std::vector<Tag>>> pending;
    for (const auto& [rel, t] : ctx.compiled_->certainFacts) {
        pending[rel][t].push_back(sr_one(spec));
    }
    for (std::uint32_t g = 0; g < groups.size(); ++g) {
        for (std::uint32_t m = 0; m < groups[g].members.size(); ++m) {
            FactId f{g, m};
            Tag tag = sr_fact(spec, f, ctx.weights_);
            if (!spec.proofBased() && sr_is_zero(spec, tag)) {
                continue;
            }
            Tuple t;
            for (const auto& a : groups[g].members[m].atom.args) {
                t.push_back(a.constant);
            }
            pending[groups[g].relation][t].push_back(std::move(tag));
        }
    }
    ctx.base_.clear();
    for (const auto& d : ctx.program().program.relations) {
        ctx.base_[d.name];
    }
    for (auto& [rel, tuples] : pending) {
        for (auto& [t, tags] : tuples) {
            ctx.base_[rel].tuples.emplace(t, sr_sum(spec, tags, ctx.weights_));
        }
    }
    ctx.relations_ = ctx.base_;
    ctx.stats_ = {};
    ctx.seeded_ = true;
}

void evaluate(EvalContext& ctx) {
    if (!ctx.seeded_) {
        seed_facts(ctx, {});
    }
    auto start = std::chrono::steady_clock::now();
    ctx.relations_ = ctx.base_;
    ctx.stats_ = {};
    Evaluator(*ctx.compiled_, ctx.spec_, ctx.weights_, ctx.base_, ctx.relations_, ctx.stats_).run();
    ctx.stats_.wallMs = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

std::vector<QueryResult> queryAtom(const EvalContext& ctx, const logic::Atom& atom, bool includeZero) {
    const auto& decl = ctx.program().relation(atom.relation);
    if (decl.arity() != atom.args.size()) {
        throw Error(ErrorCode::ArityMismatch, "query atom has wrong arity for '" + atom.relation + "'",
                atom.relation);
    }
    std::vector<QueryResult> out;
    const auto& spec = ctx.semiring();
    for (const auto& [t, tag] : ctx.relation(atom.relation).tuples) {
        if (!matches(atom, t)) {
            continue;
        }
        QueryResult r;
        r.tuple = t;
        if (spec.kind == provenance::SemiringKind::TopKProofsGrad) {
            r.grad = provenance::wmc_grad(std::get<provenance::ProofSet>(tag), ctx.weights());
            r.probability = r.grad->value;
        } else {
            r.probability = provenance::sr_probability(tag, ctx.weights());
        }
        if (r.probability > 0.0 || includeZero) {
            out.push_back(std::move(r));
        }
    }
    return out;
}

std::vector<QueryResult> query(const EvalContext& ctx, const std::string& queryName) {
    return queryAtom(ctx, ctx.program().query(queryName).atom);
}

void accumulateHeadGradients(const EvalContext& ctx, const GradProb& grad, double scale,
        const NeuralOutputs& outputs, NeuralOutputs& headGrads) {
    const auto& groups = ctx.program().program.factGroups;
    for (std::uint32_t g = 0; g < groups.size(); ++g) {
        for (std::uint32_t m = 0; m < groups[g].members.size(); ++m) {
            const auto& slot = groups[g].members[m].slot;
            if (slot.kind != logic::ProbSlot::Kind::Neural) {
                continue;
            }
            double d = grad.partial(FactId{g, m}, ctx.weights());
            auto& buf = headGrads[slot.head];
            if (buf.empty()) {
                buf.assign(outputs.at(slot.head).size(), 0.0);
            }
            buf[slot.index] += scale * d;
        }
    }
}

EvalContext run(std::shared_ptr<const CompiledProgram> compiled, SemiringSpec spec, const NeuralOutputs& outputs) {
    EvalContext ctx(std::move(compiled), spec);
    seed_facts(ctx, outputs);
    evaluate(ctx);
    return ctx;
}

}  // namespace nesy::reasoner
