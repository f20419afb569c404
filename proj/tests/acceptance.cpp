// Acceptance suite driver: runs the validation criteria and prints one
// PASS/FAIL line per criterion. Exit code 0 only when every selected
// criterion passes.

#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "qlab/validate.hpp"

int main(int argc, char** argv) {
    qlab::ValidationOptions opts;
    std::vector<int> only;
    std::string out_csv;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--quick") {
            opts.quick = true;
        } else if (arg == "--seed" && i + 1 < argc) {
            opts.seed_base = std::strtoull(argv[++i], nullptr, 10);
        } else if (arg == "--criterion" && i + 1 < argc) {
            only.push_back(std::atoi(argv[++i]));
        } else if (arg == "--out" && i + 1 < argc) {
            out_csv = argv[++i];
        } else {
            std::fprintf(stderr,
                         "usage: qlab_acceptance [--quick] [--seed S] [--criterion N]... "
                         "[--out rows.csv]\n");
            return 2;
        }
    }

    const qlab::ValidationReport rep = qlab::run_validation(opts, only);
    for (const auto& r : rep.results)
        std::printf("criterion %2d %s %s: %s\n", r.id, r.pass ? "PASS" : "FAIL", r.name.c_str(),
                    r.detail.c_str());
    if (!out_csv.empty()) qlab::write_csv(rep.rows, out_csv);
    return rep.all_pass() ? 0 : 1;
}
