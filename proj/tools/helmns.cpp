#include <cstring>
#include <iostream>

#include "helmns/driver.hpp"

namespace {

void usage(std::ostream& os) {
    os << "usage:\n"
          "  helmns run <config>               simulate and run the configured checks\n"
          "  helmns list-checks                print every check with its anchor\n"
          "  helmns compare-backends <config>  quadrature vs spectral ladder report\n"
          "\n"
          "environment: HELMNS_THREADS caps the worker count (default: machine\n"
          "parallelism).\n";
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        usage(std::cerr);
        return helmns::driver::kExitConfigError;
    }
    const std::string cmd = argv[1];
    if (cmd == "list-checks") {
        std::cout << helmns::driver::list_checks_text();
        return 0;
    }
    if (cmd == "run" || cmd == "compare-backends") {
        if (argc < 3) {
            std::cerr << cmd << ": missing config path\n";
            return helmns::driver::kExitConfigError;
        }
        return cmd == "run" ? helmns::driver::run(argv[2])
                            : helmns::driver::compare_backends(argv[2]);
    }
    if (cmd == "-h" || cmd == "--help" || cmd == "help") {
        usage(std::cout);
        return 0;
    }
    std::cerr << "unknown command '" << cmd << "'\n";
    usage(std::cerr);
    return helmns::driver::kExitConfigError;
}
