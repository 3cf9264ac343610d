// End-to-end CLI checks: subcommand plumbing, file formats, deterministic
// replay. Drives the installed binary through std::system.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

int failures = 0;

void expect(bool ok, const std::string& what) {
    if (!ok) {
        std::fprintf(stderr, "FAIL: %s\n", what.c_str());
        ++failures;
    }
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// JSONL with the wall-clock field stripped; replay identity covers the
// payload, not timing.
std::string normalized(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        size_t pos = line.find(",\"wall_ms\":");
        if (pos != std::string::npos) {
            size_t end = line.find_first_of(",}", pos + 11);
            line.erase(pos, end - pos);
        }
        out << line << "\n";
    }
    return out.str();
}

int run(const std::string& cmd) { return std::system((cmd + " > /dev/null 2>&1").c_str()); }

}  // namespace

int main() {
    const std::string cli = STABTOMO_CLI_PATH;
    const std::string dir = "/tmp/stabtomo_cli_test";
    run("rm -rf " + dir);
    run("mkdir -p " + dir);

    // gen writes an instance spec and a truth sidecar.
    expect(run(cli + " gen --kind noisy_stabilizer --n 3 --p 0.25 --seed 7 --out " + dir +
               "/inst.json --truth " + dir + "/truth.json") == 0,
           "gen exits zero");
    expect(slurp(dir + "/inst.json").find("noisy_stabilizer") != std::string::npos,
           "instance file mentions its kind");
    expect(slurp(dir + "/truth.json").find("class_fidelity") != std::string::npos,
           "truth sidecar records the class fidelity");

    // Config for a tiny stab run over the generated instance.
    {
        std::ofstream cfg(dir + "/cfg.json");
        cfg << R"({"instance": {"kind": "noisy_stabilizer", "n": 3, "noise": 0.0, "seed": 7},
                   "tau": 1.0, "gamma": 1.0, "epsilon": 0.3, "delta": 0.2,
                   "trials": 3, "master_seed": 42, "budget_cap": 2000000000})";
    }
    expect(run(cli + " stab run --config " + dir + "/cfg.json --out " + dir +
               "/r1.jsonl --csv " + dir + "/a1.csv") == 0,
           "stab run exits zero");
    expect(run(cli + " stab run --config " + dir + "/cfg.json --out " + dir +
               "/r2.jsonl --csv " + dir + "/a2.csv --workers 3") == 0,
           "stab run with workers exits zero");
    expect(!slurp(dir + "/r1.jsonl").empty(), "jsonl written");
    expect(normalized(dir + "/r1.jsonl") == normalized(dir + "/r2.jsonl"),
           "byte-identical replay across worker counts (timing masked)");
    expect(slurp(dir + "/a1.csv") == slurp(dir + "/a2.csv"), "aggregate replay");
    expect(slurp(dir + "/a1.csv").find("success_rate") != std::string::npos, "csv header");

    // magic subcommand on a 2-qubit instance.
    {
        std::ofstream cfg(dir + "/magic.json");
        cfg << R"({"instance": {"kind": "noisy_stabilizer", "n": 2, "noise": 0.0, "seed": 3},
                   "epsilon": 0.25, "delta": 0.2, "p_floor": 0.05,
                   "trials": 1, "master_seed": 5, "budget_cap": 4000000000})";
    }
    expect(run(cli + " magic --config " + dir + "/magic.json --out " + dir +
               "/magic.jsonl --csv " + dir + "/magic.csv") == 0,
           "magic exits zero");
    expect(slurp(dir + "/magic.jsonl").find("estimate") != std::string::npos,
           "magic records an estimate");

    // verify battery.
    expect(run(cli + " verify --n-max 2 --seed 9 --out " + dir + "/report.json") == 0,
           "verify exits zero");
    expect(slurp(dir + "/report.json").find("\"pass\": true") != std::string::npos,
           "verify report passes");

    // Config validation failure surfaces as a nonzero exit.
    {
        std::ofstream cfg(dir + "/bad.json");
        cfg << R"({"instance": {"kind": "noisy_stabilizer", "n": 2, "seed": 1}, "trials": 1})";
    }
    expect(run(cli + " stab run --config " + dir + "/bad.json --out " + dir +
               "/bad.jsonl --csv " + dir + "/bad.csv") != 0,
           "missing master_seed rejected");

    if (failures == 0) std::printf("cli tests passed\n");
    return failures == 0 ? 0 : 1;
}
