// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "stokeslab/verify.hpp"

using namespace stokeslab;

namespace {

const cplx kReference(-3, 2);
const std::vector<cplx> kParams{{-3, 2}, {1, 1}, {0, 4}, {-2, 1}};

struct Outcome {
    bool pass = true;
    double seconds = 0;
    std::string detail;
};

void absorb(Outcome& o, const CheckResult& r, const std::string& label) {
    o.pass = o.pass && r.pass;
    o.seconds += r.seconds;
    if (!o.detail.empty()) o.detail += " | ";
    o.detail += label + (r.pass ? "" : " FAILED") + ": " + r.detail;
}

Outcome per_parameter(int id, const std::vector<cplx>& params) {
    Outcome o;
    for (cplx a : params) {
        VerifyOptions opt;
        opt.a = a;
        absorb(o, run_check(id, opt), "A=" + format_cplx(a));
    }
    return o;
}

Outcome reference_only(int id) { return per_parameter(id, {kReference}); }

// the default figure1 command must run, then the distance criterion is checked
Outcome figure_reproduction() {
    Outcome o;
    std::ostringstream out, err;
    const char* argv[] = {"stokeslab", "figure1"};
    const int code = cli::run(2, argv, out, err);
    const bool ran = code == cli::kOk && out.str().find("n = 30:") != std::string::npos;
    o.pass = ran;
    o.detail = ran ? "figure1 exit 0" : "figure1 exit " + std::to_string(code) + " " + err.str();
    VerifyOptions opt;
    opt.a = kReference;
    absorb(o, run_check(11, opt), "A=" + format_cplx(kReference));
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
        {1, [] { return per_parameter(1, kParams); }},
        {2, [] { return per_parameter(2, kParams); }},
        {3, [] { return per_parameter(3, kParams); }},
        {4, [] { return per_parameter(4, kParams); }},
        {5, [] { return reference_only(5); }},
        {6, [] { return reference_only(6); }},
        {7, [] { return reference_only(7); }},
        {8, [] { return reference_only(8); }},
        {9, [] { return reference_only(9); }},
        {10, [] { return per_parameter(10, kParams); }},
        {11, figure_reproduction},
    };
    int failures = 0;
    for (const auto& [id, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = e.what();
        }
        if (!o.pass) ++failures;
        std::printf("%s criterion %2d (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", id, o.seconds, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
    return failures ? 1 : 0;
}
