// Regenerates the bundled synthetic fixture.
//   make_synthetic [dir] [seed]
#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "dynreserve/synthetic.hpp"

int main(int argc, char** argv) {
    const std::string dir = argc > 1 ? argv[1] : "data/synthetic";
    const std::uint64_t seed = argc > 2 ? std::stoull(argv[2]) : 1;
    try {
        dynreserve::synthetic::write_fixture(dir, seed);
    } catch (const std::exception& e) {
        std::cerr << "make_synthetic: " << e.what() << '\n';
        return 1;
    }
    std::cout << "wrote fixture to " << dir << '\n';
    return 0;
}
