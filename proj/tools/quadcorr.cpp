#include "quadcorr/cli.hpp"

int main(int argc, char** argv) {
    return quadcorr::run(argc, argv);
}
