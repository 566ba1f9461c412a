/*
   Copyright 2025 The asdr authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

// asdr: Ekedahl-Oort types of Artin-Schreier double covers in characteristic 2.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "asdr_cli.hpp"

int main(int argc, char** argv) {
    using namespace asdr::cli;
    RunConfig rc;
    CLI::App app{"Ekedahl-Oort types of Artin-Schreier double covers in characteristic 2"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string format = "human";
    app.add_option("--format", format, "output format")->check(CLI::IsMember({"human", "jsonl"}));
    app.add_option("--out", rc.out_path, "write output to this path");
    app.add_option("--field", rc.field, "work over GF(2^m)")->check(CLI::Range(1, 32));

    auto* compute = app.add_subcommand("compute", "genus, p-rank, V-type, k[V] structure and final type of a curve");
    compute->add_option("config", rc.config_path, "curve config")->required()->check(CLI::ExistingFile);
    compute->add_option("--n", rc.n, "pole multiplier of the ambient divisor")->check(CLI::PositiveNumber);
    compute->add_flag("--dump-module", rc.dump_module, "print the F, V and Gram matrices");

    auto* predict = app.add_subcommand("predict", "closed-form predictions and bounds for the top double cover");
    predict->add_option("config", rc.config_path, "curve config")->required()->check(CLI::ExistingFile);
    predict->add_option("--max-perp", rc.max_perp, "largest number of complements in the bounds table");
    predict->add_option("--max-exp", rc.max_exp, "largest V exponent in the bounds table");

    auto* verify = app.add_subcommand("verify", "compare a prediction with the computed invariants");
    verify->add_option("config", rc.config_path, "curve config, or the base curve with --count")->required()->check(CLI::ExistingFile);
    verify->add_option("--mode", rc.mode, "prediction to verify")
        ->required()
        ->check(CLI::IsMember({"ordinary", "2n1", "ss-vtype", "bounds"}));
    verify->add_option("--count", rc.count, "verify this many random covers of the base");
    verify->add_option("--d", rc.d, "break at infinity of the random covers");
    verify->add_option("--seed", rc.seed, "seed of the random covers");
    verify->add_option("--threads", rc.threads, "worker threads (0 = all cores)");

    auto* search = app.add_subcommand("search", "final types of random one-point covers of a base curve");
    search->add_option("config", rc.config_path, "base curve config")->required()->check(CLI::ExistingFile);
    search->add_option("--d", rc.d, "break at infinity")->required();
    search->add_option("--count", rc.count, "number of covers")->required();
    search->add_option("--seed", rc.seed, "seed");
    search->add_option("--threads", rc.threads, "worker threads (0 = all cores)");

    auto* selftest = app.add_subcommand("selftest", "run the built-in invariant suite");
    selftest->add_flag("--quick", rc.quick, "fast subset");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }
    rc.command = app.get_subcommands().front()->get_name();
    rc.format = format == "jsonl" ? Format::Jsonl : Format::Human;
    if (rc.out_path.empty()) return run_command(rc, std::cout, std::cerr);
    std::ofstream out(rc.out_path, std::ios::app);
    if (!out) {
        std::cerr << "error: cannot open '" << rc.out_path << "'\n";
        return kUsage;
    }
    return run_command(rc, out, std::cerr);
}
