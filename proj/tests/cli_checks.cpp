// End-to-end checks of the command-line tool: exit codes, output files, and
// byte-level determinism. Invoked by ctest with the binary path as argv[1].

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int failures = 0;

void expect(bool ok, const std::string& what) {
    std::cout << (ok ? "ok" : "FAIL") << " - " << what << "\n";
    if (!ok) ++failures;
}

int run(const std::string& cmd) {
    int status = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: cli_checks <binary>\n";
        return 2;
    }
    const std::string bin = std::string("\"") + argv[1] + "\"";
    fs::path dir = fs::temp_directory_path() / "oligo_cli_checks";
    fs::remove_all(dir);
    fs::create_directories(dir);

    write(dir / "pricing.json",
          R"({"schema":1,"market":{"l":20,"m":10,"n":3,"v":100,"c":1,"penalty_family":"additive-cubic"},
              "alpha":[0.2,0.2,0.2]})");
    write(dir / "line4.json",
          R"({"schema":1,"market":{"l":10,"m":1,"n":1,"v":10,"c":1,"penalty_family":"identity"},
              "state_model":{"kind":"iid","q":0.5},"graph":{"kind":"linear","n":4}})");
    write(dir / "sim.json",
          R"({"schema":1,"market":{"l":5,"m":1,"n":1,"v":10,"c":1,"penalty_family":"identity"},
              "state_model":{"kind":"iid","q":0.5},"graph":{"kind":"cycle","n":6},
              "seed":7,"rounds":2000})");
    write(dir / "bad.json", R"({"schema":1,"market":{"l":1,"m":1,"v":10,"c":20}})");

    const std::string out1 = (dir / "out1").string();
    const std::string out2 = (dir / "out2").string();

    expect(run(bin + " pricing --config " + (dir / "pricing.json").string() + " --out-dir " +
               out1) == 0,
           "pricing succeeds");
    expect(fs::exists(fs::path(out1) / "pricing.csv"), "pricing writes CSV");
    expect(fs::exists(fs::path(out1) / "pricing.json"), "pricing writes JSON");
    {
        std::string csv = slurp(fs::path(out1) / "pricing.csv");
        expect(csv.rfind("j,alpha_j,p_j,L_j,U_j\n", 0) == 0, "CSV has a header row");
    }

    expect(run(bin + " pricing --config " + (dir / "pricing.json").string() + " --out-dir " +
               out2 + " --format csv") == 0,
           "format csv succeeds");
    expect(fs::exists(fs::path(out2) / "pricing.csv") &&
               !fs::exists(fs::path(out2) / "pricing.json"),
           "--format csv writes only the CSV");

    // determinism: same config + seed must be byte-identical
    const std::string simA = (dir / "simA").string(), simB = (dir / "simB").string();
    expect(run(bin + " simulate --setting 2 --config " + (dir / "sim.json").string() +
               " --out-dir " + simA) == 0,
           "simulate succeeds");
    expect(run(bin + " simulate --setting 2 --config " + (dir / "sim.json").string() +
               " --out-dir " + simB) == 0,
           "simulate rerun succeeds");
    expect(slurp(fs::path(simA) / "simulate.csv") == slurp(fs::path(simB) / "simulate.csv") &&
               slurp(fs::path(simA) / "simulate.json") == slurp(fs::path(simB) / "simulate.json"),
           "same config and seed give byte-identical outputs");

    // a different seed must actually change the estimate
    const std::string simC = (dir / "simC").string();
    expect(run(bin + " simulate --setting 2 --seed 8 --config " + (dir / "sim.json").string() +
               " --out-dir " + simC) == 0,
           "seed override succeeds");
    expect(slurp(fs::path(simA) / "simulate.csv") != slurp(fs::path(simC) / "simulate.csv"),
           "different seed changes the output");

    expect(run(bin + " spsym-audit --config " + (dir / "line4.json").string() + " --out-dir " +
               (dir / "audit").string()) == 2,
           "failed audit exits with code 2");
    expect(run(bin + " pricing --config " + (dir / "bad.json").string()) == 1,
           "invalid market exits with code 1");
    expect(run(bin + " pricing --config " + (dir / "missing.json").string()) == 1,
           "missing config exits with code 1");
    expect(run(bin + " linear-family --config " + (dir / "line4.json").string() +
               " --r 0.2 --r1 0.2") == 1,
           "violated family constraint exits with code 1");
    expect(run(bin) != 0, "missing subcommand is rejected");

    for (const char* cmd : {"pricing", "mean-valid", "audit-ne", "spsym-audit", "linear-family",
                            "components", "mrf-audit", "simulate", "efficiency"})
        expect(run(bin + " " + cmd + " --describe") == 0,
               std::string(cmd) + " --describe documents its columns");

    std::cout << (failures ? "FAILED" : "all cli checks passed") << "\n";
    return failures ? 1 : 0;
}
