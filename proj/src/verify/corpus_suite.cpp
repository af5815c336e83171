#include "nesy/error.h"
#include "nesy/logic/parser.h"
#include "nesy/logic/printer.h"
#include "nesy/logic/validate.h"
#include "nesy/verify/suites.h"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

namespace nesy::verify {

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot read file", p.string());
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string checkValid(const std::string& source, const std::filesystem::path& astFile) {
    logic::Program program = logic::parseSource(source);
    logic::validate(program);
    std::string dump = logic::dumpProgram(program);
    if (dump != slurp(astFile)) {
        return "AST differs from " + astFile.filename().string() + ":\n" + dump;
    }
    std::string printed = logic::printProgram(program);
    logic::Program again = logic::parseSource(printed);
    if (!(again == program)) {
        return "pretty-printed program re-parses differently:\n" + printed;
    }
    logic::validate(again);
    return {};
}

std::string checkInvalid(const std::string& source, const std::string& expected) {
    try {
        logic::validate(logic::parseSource(source));
    } catch (const Error& e) {
        std::string got = std::string(errorCodeName(e.code())) + " " + std::to_string(e.line()) + ":" +
                          std::to_string(e.column());
        return got == expected ? std::string() : "expected " + expected + ", got " + got + " (" + e.what() + ")";
    }
    return "expected " + expected + ", but the program is valid";
}

}  // namespace

SuiteResult parserCorpus(const std::filesystem::path& dir) {
    SuiteResult r("parserCorpus");
    auto start = std::chrono::steady_clock::now();
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() == ".nsl") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    const std::string marker = "// expect: ";
    for (const auto& file : files) {
        ++r.instances;
        std::string source = slurp(file);
        std::string first = source.substr(0, source.find('\n'));
        if (first.rfind(marker, 0) != 0) {
            r.fail(file.filename().string() + ": missing expectation line");
            continue;
        }
        std::string expected = first.substr(marker.size());
        std::string problem;
        try {
            problem = expected == "OK" ? checkValid(source, std::filesystem::path(file).replace_extension(".ast"))
                                       : checkInvalid(source, expected);
        } catch (const Error& e) {
            problem = std::string(errorCodeName(e.code())) + ": " + e.what();
        }
        if (!problem.empty()) {
            r.fail(file.filename().string() + ": " + problem);
        }
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

}  // namespace nesy::verify
