#include "nesy/verify/random_program.h"

#include "nesy/error.h"
#include "nesy/logic/parser.h"

#include <random>
#include <set>
#include <sstream>

namespace nesy::verify {

namespace {

struct RelSpec {
    const char* name;
    int arity;
};

constexpr RelSpec kBodyRelations[] = {{"e", 2}, {"a", 1}, {"c", 1}, {"n", 1}, {"p", 2}, {"q", 1}, {"r", 1}};
constexpr RelSpec kHeadRelations[] = {{"p", 2}, {"q", 1}, {"r", 1}};
const char* kVarNames[] = {"X", "Y", "Z"};

class Generator {
public:
    Generator(std::uint64_t seed, const RandomProgramOptions& options) : rng_(seed), opt_(options) {}

    std::pair<std::string, std::string> build() {
        std::ostringstream os;
        os << "rel e(int, int). rel a(int). rel c(int). rel n(int).\n";
        os << "rel p(int, int). rel q(int). rel r(int).\n";
        std::size_t budget = 1 + pick(opt_.maxVariables);
        std::size_t groups = opt_.allowDisjunctions ? pick(std::min<std::size_t>(budget, 3)) : 0;
        for (std::size_t g = 0; g < groups; ++g) {
            std::size_t size = 2 + pick(2);
            std::vector<int> vals{1, 2, 3};
            std::shuffle(vals.begin(), vals.end(), rng_);
            std::vector<double> ps;
            double total = 0;
            for (std::size_t m = 0; m < size; ++m) {
                ps.push_back(1.0 + static_cast<double>(pick(9)));
                total += ps.back();
            }
            for (std::size_t m = 0; m < size; ++m) {
                // Last member takes the remainder so the constants sum to one exactly enough.
                double p = m + 1 < size ? ps[m] / total : 0.0;
                if (m + 1 == size) {
                    double used = 0;
                    for (std::size_t j = 0; j + 1 < size; ++j) {
                        used += ps[j] / total;
                    }
                    p = 1.0 - used;
                }
                os << (m ? "; " : "") << formatFloat(p) << "::c(" << vals[m] << ")";
            }
            os << ".\n";
            populated_.insert("c");
        }
        for (std::size_t i = groups; i < budget; ++i) {
            double p = static_cast<double>(1 + pick(19)) / 20.0;
            if (pick(3) == 0) {
                os << formatFloat(p) << "::a(" << 1 + pick(3) << ").\n";
                populated_.insert("a");
            } else {
                populated_.insert("e");
                os << formatFloat(p) << "::e(" << 1 + pick(3) << ", " << 1 + pick(3) << ").\n";
            }
        }
        for (int v = 1; v <= 3; ++v) {
            if (pick(2)) {
                os << "n(" << v << ").\n";
                populated_.insert("n");
            }
        }
        if (pick(2)) {
            os << "e(" << 1 + pick(3) << ", " << 1 + pick(3) << ").\n";
            populated_.insert("e");
        }
        std::size_t rules = 1 + pick(opt_.maxRules);
        std::set<std::string> heads;
        for (std::size_t i = 0; i < rules; ++i) {
            os << rule(heads) << "\n";
        }
        std::vector<std::string> hs(heads.begin(), heads.end());
        std::string head = hs[pick(hs.size())];
        std::string query = head == "p" ? "query p(A, B)." : "query " + head + "(A).";
        os << query << "\n";
        return {os.str(), head};
    }

private:
    std::size_t pick(std::size_t n) {
        return n == 0 ? 0 : static_cast<std::size_t>(rng_() % n);
    }

    std::string term(std::set<std::string>& bound, bool allowConstant) {
        if (allowConstant && pick(8) == 0) {
            return std::to_string(1 + pick(3));
        }
        std::string v = kVarNames[pick(3)];
        bound.insert(v);
        return v;
    }

    std::string rule(std::set<std::string>& heads) {
        const RelSpec& head = kHeadRelations[pick(3)];
        std::set<std::string> bound;
        std::vector<std::string> body;
        std::size_t atoms = 1 + pick(2);
        for (std::size_t i = 0; i < atoms; ++i) {
            // The first atom draws from relations that can hold tuples; later ones may recurse.
            std::vector<const RelSpec*> choices;
            for (const auto& rel : kBodyRelations) {
                if (populated_.count(rel.name) || (i > 0 && rel.name == std::string(head.name))) {
                    choices.push_back(&rel);
                }
            }
            const RelSpec& rel = *choices[pick(choices.size())];
            std::string a = std::string(rel.name) + "(" + term(bound, true);
            if (rel.arity == 2) {
                a += ", " + term(bound, true);
            }
            body.push_back(a + ")");
        }
        std::vector<std::string> vars(bound.begin(), bound.end());
        if (!vars.empty() && pick(10) < 3) {
            const char* ops[] = {"!=", "<", "<=", ">"};
            std::string rhs = pick(2) ? vars[pick(vars.size())] : std::to_string(1 + pick(3));
            body.push_back(vars[pick(vars.size())] + " " + ops[pick(4)] + " " + rhs);
        }
        if (opt_.allowNegation && pick(10) < 3) {
            std::string arg = vars.empty() || pick(4) == 0 ? std::to_string(1 + pick(3)) : vars[pick(vars.size())];
            body.push_back("not n(" + arg + ")");
        }
        auto headArg = [&] { return vars.empty() ? std::to_string(1 + pick(3)) : vars[pick(vars.size())]; };
        std::string h = std::string(head.name) + "(" + headArg();
        if (head.arity == 2) {
            h += ", " + headArg();
        }
        h += ")";
        heads.insert(head.name);
        populated_.insert(head.name);
        std::string out = h + " :- ";
        for (std::size_t i = 0; i < body.size(); ++i) {
            out += (i ? ", " : "") + body[i];
        }
        return out + ".";
    }

    std::mt19937_64 rng_;
    RandomProgramOptions opt_;
    std::set<std::string> populated_;
};

}  // namespace

RandomProgram randomProgram(std::uint64_t seed, const RandomProgramOptions& options) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        Generator gen(seed * 7919 + attempt, options);
        auto [source, head] = gen.build();
        try {
            RandomProgram out;
            out.source = source;
            out.program = logic::validate(logic::parseSource(source));
            out.query = out.program.query(head).atom;
            return out;
        } catch (const Error&) {
            if (attempt > 1000) {
                throw;
            }
        }
    }
}

}  // namespace nesy::verify
