#include "doctest.h"

#include "nesy/verify/suites.h"

#include <fstream>
#include <unistd.h>

using namespace nesy;

namespace {

const std::filesystem::path kCorpus = NESY_CORPUS_DIR;

}  // namespace

TEST_CASE("parser corpus") {
    auto r = verify::parserCorpus(kCorpus);
    CHECK(r.instances == 30);
    CHECK_MESSAGE(r.passed(), r.firstFailure);
}

TEST_CASE("parser corpus notices a wrong expectation") {
    auto dir = std::filesystem::temp_directory_path() / ("nesy_corpus_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    for (const auto& name : {"v03_zero_arity", "e05_duplicate_relation"}) {
        for (const auto* ext : {".nsl", ".ast"}) {
            auto from = kCorpus / (std::string(name) + ext);
            if (std::filesystem::exists(from)) {
                std::filesystem::copy_file(from, dir / from.filename());
            }
        }
    }
    CHECK(verify::parserCorpus(dir).passed());

    std::ofstream(dir / "v03_zero_arity.ast", std::ios::app) << "(query extra 9:1 (extra))\n";
    auto wrongAst = verify::parserCorpus(dir);
    CHECK(wrongAst.failures == 1);
    CHECK(wrongAst.firstFailure.find("v03_zero_arity") != std::string::npos);

    std::ofstream(dir / "e05_duplicate_relation.nsl") << "// expect: DuplicateRelation 2:1\nrel p(int).\nrel p(int).\n";
    CHECK(verify::parserCorpus(dir).failures == 2);
    std::filesystem::remove_all(dir);
}
