#include <CLI11.hpp>

#include <cstdio>

#include "irisct/error.hpp"

int main(int argc, char** argv) {
    CLI::App app{"iris recognition pipeline"};
    app.require_subcommand(1);

    CLI::App* version = app.add_subcommand("version", "print version and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (version->parsed()) {
            std::puts("irisct 0.1.0");
            return 0;
        }
    } catch (const irisct::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
