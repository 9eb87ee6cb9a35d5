#include <iostream>
#include <string>
#include <vector>

#include "oe/cli.hpp"

namespace {

constexpr const char* kUsage = R"(usage: oebench <run|sweep|table1|validate> [options]

  --algo {pot|bolt|beb|mbie-eb|vbrb|greedy}   algorithm (default pot)
  --param <real>          algorithm parameter (default: best no-prior value)
  --grid <a,b,...>        parameter grid for sweep
  --prior {uniform|informative}
  --alpha0 <real>         prior pseudo-count per entry (default 0.02)
  --weight <real>         informative prior weight (default 0)
  --runs <int>            trials per batch (default 2000)
  --steps <int>           steps per trial (default 1000)
  --gamma <real>          planning discount, in [0, 1) (default 0.95)
  --tol <real>            value-iteration tolerance (default 0.1)
  --horizon <int>         optimism cap H (default 20)
  --seed <int>            seed of trial 0 (default 0)
  --out <path>            results CSV (default <verb>.csv)
  --config <path>         key=value file; flags override it
  --freeze-belief         stop updating well-known state-action pairs
  --theta-source {eq6|eq7}
  --sigma-mode {std|var}
  --lambda <real>         validate: confidence multiplier (default 3)
  --samples <int>         validate: coverage samples (default 10000)
  --beliefs <int>         validate: random beliefs for dominance (default 100)

Environment: OE_WORKERS caps worker threads, OE_KERNEL forces a kernel set.
)";

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    for (const auto& a : args) {
        if (a == "-h" || a == "--help") {
            std::cout << kUsage;
            return 0;
        }
    }
    return oe::cli::run_main(args, std::cout, std::cerr);
}
