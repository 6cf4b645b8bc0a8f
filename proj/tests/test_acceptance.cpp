// Acceptance suite: runs every criterion on the four shipped parameter sets
// at default resolutions and prints one pass/fail line per criterion. This is
// the same machinery the `verify` subcommand drives.

#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <iostream>

#include "kinmodes/verify.hpp"

using namespace kinmodes;

TEST_CASE("acceptance: all criteria on the shipped parameter sets") {
    std::vector<RunConfig> configs;
    for (const auto& n : shipped_set_names()) configs.push_back(shipped_config(n));

    const auto t0 = std::chrono::steady_clock::now();
    VerificationRun run = run_verification(configs, /*fast=*/false);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::cout << format_table(run.results);
    std::cout << "total verification wall time: " << wall << " s\n";

    for (const auto& r : run.results) {
        if (!r.applicable) continue;
        INFO(r.set << " criterion " << r.id << " (" << r.name << "): " << r.detail);
        CHECK(r.pass);
    }
}
