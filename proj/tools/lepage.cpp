#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "lepage/errors.hpp"
#include "lepage/report.hpp"

#ifndef LEPAGE_FIXTURE_DIR
#define LEPAGE_FIXTURE_DIR "fixtures"
#endif

namespace fs = std::filesystem;
using namespace lepage;

namespace {

constexpr int kUsage = 64;
constexpr int kParse = 65;

struct Outcome {
    int code = 0;
    std::string out;
    std::string err;
    std::string verdict;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome analyze_file(const std::string& path, const std::vector<std::pair<std::string, Rational>>& params,
                     const AnalyzeOptions& opts, Format fmt) {
    Outcome o;
    try {
        ProblemDocument doc = parse_problem(slurp(path));
        if (!params.empty()) {
            for (const auto& [n, v] : params) set_param(doc, n, v);
            doc = parse_problem(serialize_problem(doc));
        }
        Analysis a = analyze(doc, opts);
        ReportDocument r = make_report(a);
        o.out = emit(r, fmt);
        for (const auto& d : r.diagnostics) o.err += path + ": " + d + "\n";
        o.code = exit_code(a.verdict);
        o.verdict = r.ladder.verdict;
    } catch (const ParseError& e) {
        o.err = path + ":" + e.what() + "\n";
        o.code = kParse;
    } catch (const std::exception& e) {
        o.err = path + ": " + e.what() + "\n";
        o.code = kParse;
    }
    return o;
}

// Runs jobs(i) for i < n on up to `jobs` threads; results keep index order.
std::vector<Outcome> fan_out(std::size_t n, unsigned jobs, const std::function<Outcome(std::size_t)>& f) {
    std::vector<Outcome> res(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < n;) res[i] = f(i);
    };
    std::vector<std::thread> pool;
    unsigned k = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
    for (unsigned t = 1; t < k; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return res;
}

std::vector<std::string> fixture_files(const std::string& dir) {
    std::vector<std::string> out;
    if (!fs::is_directory(dir)) return out;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".prob") out.push_back(e.path().string());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hamilton-Cartan constraint analysis for variational problems"};
    app.require_subcommand(1);

    auto* an = app.add_subcommand("analyze", "analyze problem files");
    std::vector<std::string> files;
    std::vector<std::string> raw_params;
    std::uint64_t seed = 0;
    int max_prolong = 0;
    std::string format = "text";
    std::string out_path;
    unsigned jobs = 1;
    an->add_option("files", files, "problem files")->required()->check(CLI::ExistingFile);
    an->add_option("--param", raw_params, "parameter override name=p/q");
    auto* seed_opt = an->add_option("--seed", seed, "sampling seed");
    auto* prolong_opt = an->add_option("--max-prolong", max_prolong, "prolongation budget")->check(CLI::PositiveNumber);
    an->add_option("--format", format, "text or structured")->check(CLI::IsMember({"text", "structured"}));
    an->add_option("--out", out_path, "write the report here");
    an->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

    auto* fx = app.add_subcommand("fixtures", "bundled fixtures");
    fx->require_subcommand(1);
    std::string dir = LEPAGE_FIXTURE_DIR;
    fx->add_option("--dir", dir, "fixture directory");
    auto* fx_list = fx->add_subcommand("list", "list fixtures");
    auto* fx_run = fx->add_subcommand("run", "run fixtures and compare verdicts");
    std::vector<std::string> only;
    fx_run->add_option("names", only, "fixture names");
    fx_run->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    if (*an) {
        std::vector<std::pair<std::string, Rational>> params;
        for (const auto& p : raw_params) {
            auto eq = p.find('=');
            Rational v;
            if (eq == std::string::npos || v.set_str(p.substr(eq + 1), 10) != 0) {
                std::cerr << "bad --param '" << p << "', expected name=p/q\n";
                return kUsage;
            }
            v.canonicalize();
            params.emplace_back(p.substr(0, eq), v);
        }
        AnalyzeOptions opts;
        if (*seed_opt) opts.seed = seed;
        if (*prolong_opt) opts.max_prolong = max_prolong;
        Format fmt = format == "text" ? Format::text : Format::structured;
        auto res = fan_out(files.size(), jobs, [&](std::size_t i) { return analyze_file(files[i], params, opts, fmt); });
        std::string all;
        int code = 0;
        for (const auto& r : res) {
            all += r.out;
            std::cerr << r.err;
            code = std::max(code, r.code);
        }
        if (out_path.empty()) {
            std::cout << all;
        } else {
            std::ofstream o(out_path, std::ios::binary);
            if (!o) {
                std::cerr << "cannot write " << out_path << "\n";
                return kUsage;
            }
            o << all;
        }
        return code;
    }

    auto files_in = fixture_files(dir);
    if (*fx_list) {
        for (const auto& f : files_in) std::cout << fs::path(f).stem().string() << "\n";
        return files_in.empty() ? kUsage : 0;
    }
    if (*fx_run) {
        std::vector<std::string> chosen;
        for (const auto& f : files_in) {
            std::string stem = fs::path(f).stem().string();
            if (only.empty() || std::find(only.begin(), only.end(), stem) != only.end()) chosen.push_back(f);
        }
        if (chosen.empty()) {
            std::cerr << "no fixtures found in " << dir << "\n";
            return kUsage;
        }
        auto res = fan_out(chosen.size(), jobs, [&](std::size_t i) {
            Outcome o = analyze_file(chosen[i], {}, {}, Format::text);
            std::string expect;
            try {
                expect = parse_problem(slurp(chosen[i])).expect;
            } catch (const std::exception&) {
            }
            bool ok = o.code != kParse && (expect.empty() || expect == o.verdict);
            o.out = std::string(ok ? "PASS " : "FAIL ") + fs::path(chosen[i]).stem().string() + ": " + o.verdict +
                    (expect.empty() ? "" : " (expected " + expect + ")") + "\n";
            o.code = ok ? 0 : 1;
            return o;
        });
        int code = 0;
        for (const auto& r : res) {
            std::cout << r.out;
            if (r.code) std::cerr << r.err;
            code = std::max(code, r.code);
        }
        return code;
    }
    return kUsage;
}
