// Acceptance gate: every binding numeric claim about the pipeline runs here,
// one criterion per --criterion value, each printing a single PASS/FAIL line.
// Tolerances are pinned in acceptance.hpp next to each check.
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

#include <cgoslab/acceptance.hpp>

int main(int argc, char** argv) {
    int criterion = 0;  // 0 = run all
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            criterion = std::atoi(argv[++i]);
        } else if (std::strcmp(argv[i], "--help") == 0) {
            std::printf("usage: acceptance [--criterion N]   (N in 1..%d)\n",
                        cgoslab::acceptance::criterion_count);
            return 0;
        } else {
            std::fprintf(stderr, "unknown argument: %s\n", argv[i]);
            return 2;
        }
    }
    if (criterion < 0 || criterion > cgoslab::acceptance::criterion_count) {
        std::fprintf(stderr, "criterion out of range: %d\n", criterion);
        return 2;
    }
    bool ok = true;
    if (criterion == 0) {
        for (int c = 1; c <= cgoslab::acceptance::criterion_count; ++c)
            ok = cgoslab::acceptance::run_criterion(c) && ok;
    } else {
        ok = cgoslab::acceptance::run_criterion(criterion);
    }
    return ok ? 0 : 1;
}
