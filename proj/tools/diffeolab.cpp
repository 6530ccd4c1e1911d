// Command line front end.
//
//   diffeolab run <file> [--format text|json] [--degree D] [--out PATH]
//   diffeolab check-paper
//
// Exit codes: 0 all verdicts as expected, 1 evaluation failure or report
// mismatch, 2 parse or configuration error.  The environment variable
// DIFFEOLAB_DEGREE, when set, overrides the decomposition degree bound
// (including a --degree flag).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "diffeolab/interp.hpp"
#include "regression_corpus.hpp"

namespace {

// trailing-whitespace-insensitive comparison keeps golden files editor-safe
std::string rstrip(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' '))
        s.pop_back();
    return s;
}

bool is_config_error(const diffeolab::Error& e) {
    return e.kind == diffeolab::Err::ParseFailure || e.kind == diffeolab::Err::UnknownName;
}

// env var beats flag beats default
int resolve_degree(unsigned flag_value, bool& bad_env) {
    const char* env = std::getenv("DIFFEOLAB_DEGREE");
    if (!env) return static_cast<int>(flag_value);
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (!end || *end != '\0' || v < 0) {
        bad_env = true;
        return static_cast<int>(flag_value);
    }
    return static_cast<int>(v);
}

int run_document(const std::string& source, unsigned degree, const std::string& format,
                 const std::string& out_path) {
    diffeolab::interp::Report rep;
    try {
        diffeolab::dsl::Document doc = diffeolab::dsl::parse(source);
        rep = diffeolab::interp::run(doc, diffeolab::interp::RunConfig{degree});
    } catch (const diffeolab::Error& e) {
        std::cerr << e.what() << "\n";
        return is_config_error(e) ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    std::string text = format == "json" ? diffeolab::interp::emit_json(rep) + "\n"
                                        : diffeolab::interp::emit_text(rep);
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) {
            std::cerr << "cannot write " << out_path << "\n";
            return 2;
        }
        out << text;
    }
    return 0;
}

int check_paper(unsigned degree) {
    std::string produced;
    try {
        diffeolab::dsl::Document doc =
            diffeolab::dsl::parse(std::string(diffeolab::regression::kDocument));
        diffeolab::interp::Report rep =
            diffeolab::interp::run(doc, diffeolab::interp::RunConfig{degree});
        produced = diffeolab::interp::emit_json(rep);
    } catch (const diffeolab::Error& e) {
        std::cerr << e.what() << "\n";
        return is_config_error(e) ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    const std::string expected = rstrip(std::string(diffeolab::regression::kGolden));
    if (rstrip(produced) == expected) {
        std::cout << "check-paper: report matches the recorded golden\n";
        return 0;
    }
    // locate the first differing line for a usable message
    std::istringstream got(rstrip(produced)), want(expected);
    std::string gl, wl;
    int line = 1;
    while (true) {
        bool g = static_cast<bool>(std::getline(got, gl));
        bool w = static_cast<bool>(std::getline(want, wl));
        if (!g && !w) break;
        if (gl != wl || g != w) {
            std::cerr << "check-paper: mismatch at line " << line << "\n  expected: "
                      << (w ? wl : std::string("<end>")) << "\n  got:      "
                      << (g ? gl : std::string("<end>")) << "\n";
            break;
        }
        ++line;
        gl.clear();
        wl.clear();
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact invariants of finitely generated diffeological vector spaces "
                 "and vector pseudo-bundles"};
    app.require_subcommand(1);

    std::string file, format = "text", out_path;
    unsigned degree = 4;

    CLI::App* run_cmd = app.add_subcommand("run", "evaluate a document and print its report");
    run_cmd->add_option("file", file, "input document")->required();
    run_cmd->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"text", "json"}));
    run_cmd->add_option("--degree", degree, "decomposition degree bound (default 4)");
    run_cmd->add_option("--out", out_path, "write the report to this path");

    CLI::App* check_cmd = app.add_subcommand(
        "check-paper", "run the shipped calibration document against its recorded report");
    (void)check_cmd;

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    bool bad_env = false;
    int resolved = resolve_degree(degree, bad_env);
    if (bad_env) {
        std::cerr << "DIFFEOLAB_DEGREE must be a non-negative integer\n";
        return 2;
    }

    if (run_cmd->parsed()) {
        std::ifstream in(file, std::ios::binary);
        if (!in) {
            std::cerr << "cannot open " << file << "\n";
            return 2;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        return run_document(buf.str(), static_cast<unsigned>(resolved), format, out_path);
    }
    return check_paper(static_cast<unsigned>(resolved));
}
