#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

using Catch::Matchers::ContainsSubstring;

namespace {

struct RunResult {
    int status = -1;
    std::string output;
};

// Run the installed command-line binary and capture interleaved output.
RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(CORRDYN_CLI_PATH) + " " + args + " 2>&1";
    std::FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[1024];
    while (std::fgets(buf, sizeof buf, pipe)) r.output += buf;
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

struct TempFile {
    std::string path;
    explicit TempFile(const char* stem)
        : path(std::string("corrdyn_cli_test_") + stem) {}
    ~TempFile() { std::remove(path.c_str()); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

} // namespace

TEST_CASE("one backward step from the fixed point, echoed and exact") {
    const RunResult r = run_cli("backward --a 4 --z 1 --n 1");
    CHECK(r.status == 0);
    CHECK_THAT(r.output, ContainsSubstring("# command=backward"));
    CHECK_THAT(r.output, ContainsSubstring("# a=4"));
    CHECK_THAT(r.output, ContainsSubstring("# z=1"));
    CHECK_THAT(r.output, ContainsSubstring("re,im,at_infinity,weight"));
    CHECK_THAT(r.output, ContainsSubstring("1,0,0,0.5"));
    CHECK_THAT(r.output, ContainsSubstring("-2,0,0,0.5"));
}

TEST_CASE("covering images from the shared point") {
    const RunResult r = run_cli("cov --z 1");
    CHECK(r.status == 0);
    CHECK_THAT(r.output, ContainsSubstring("1,0 multiplicity=1"));
    CHECK_THAT(r.output, ContainsSubstring("-2,0 multiplicity=1"));
}

TEST_CASE("exit codes distinguish usage, runtime and success") {
    CHECK(run_cli("definitely-not-a-command").status == 2);
    CHECK(run_cli("periodic --n 99").status == 2);            // out of range
    CHECK(run_cli("limitset --a 9 --out x.ppm").status == 2); // outside the disk
    CHECK(run_cli("backward --a 1 --z 0").status == 2);       // degenerate a
    CHECK(run_cli("measure evolve --z 1 --in nope.csv --out o.csv").status == 2);
    CHECK(run_cli("measure evolve --in no_such_file.csv --out o.csv --direction backward")
              .status == 1);
    CHECK(run_cli("--help").status == 0);
    CHECK(run_cli("backward --help").status == 0);
}

TEST_CASE("config file supplies defaults and flags override it") {
    TempFile ini("run.ini");
    {
        std::ofstream out(ini.path);
        out << "# stored run configuration\na=7\nthreads=1\n";
    }
    const RunResult from_config = run_cli("periodic --n 1 --config " + ini.path);
    CHECK(from_config.status == 0);
    CHECK_THAT(from_config.output,
               ContainsSubstring("distinct=1 total_multiplicity=4"));

    const RunResult overridden =
        run_cli("periodic --n 1 --config " + ini.path + " --a 4");
    CHECK(overridden.status == 0);
    CHECK_THAT(overridden.output,
               ContainsSubstring("distinct=3 total_multiplicity=4"));
}

TEST_CASE("periodic subcommand writes the labeled table") {
    TempFile csv("p2.csv");
    const RunResult r =
        run_cli("periodic --a 4 --n 2 --method newton --out " + csv.path);
    CHECK(r.status == 0);
    CHECK_THAT(r.output, ContainsSubstring("distinct=7 total_multiplicity=8"));
    const std::string text = slurp(csv.path);
    CHECK_THAT(text, ContainsSubstring("re,im,at_infinity,multiplicity,side,verified"));
    CHECK_THAT(text, ContainsSubstring("1,0,0,2,fixed1,1"));
    CHECK_THAT(text, ContainsSubstring("# n=2"));
}

TEST_CASE("superstable search reports the exceptional parameter first") {
    const RunResult r = run_cli("superstable --n 1 --grid 16");
    CHECK(r.status == 0);
    CHECK_THAT(r.output, ContainsSubstring("critical=yes"));
    CHECK_THAT(r.output, ContainsSubstring("a=4.9999999999"));
}

TEST_CASE("measure pipeline round trips through files") {
    TempFile m1("evolve1.csv");
    TempFile m2("evolve2.csv");
    const RunResult e1 =
        run_cli("measure evolve --a 4 --z 1 --n 6 --out " + m1.path);
    CHECK(e1.status == 0);
    const RunResult e2 = run_cli("measure evolve --a 4 --in " + m1.path +
                                 " --n 2 --out " + m2.path);
    CHECK(e2.status == 0);

    const RunResult cmp =
        run_cli("measure compare --in-a " + m1.path + " --in-b " + m2.path);
    CHECK(cmp.status == 0);
    const double d = std::strtod(cmp.output.c_str(), nullptr);
    CHECK(d >= 0.0);
    CHECK(d < 1.0);

    const RunResult res = run_cli("measure residual --in " + m1.path);
    CHECK(res.status == 0);
    CHECK(std::strtod(res.output.c_str(), nullptr) >= 0.0);
}

TEST_CASE("identical runs produce identical bytes") {
    TempFile f1("rep1.csv");
    TempFile f2("rep2.csv");
    CHECK(run_cli("backward --a 4 --z 0.3 --n 8 --threads 1 --out " + f1.path)
              .status == 0);
    CHECK(run_cli("backward --a 4 --z 0.3 --n 8 --threads 4 --out " + f2.path)
              .status == 0);
    const std::string b1 = slurp(f1.path);
    const std::string b2 = slurp(f2.path);
    // The echo header records the thread count; the data must not change.
    const auto data1 = b1.substr(b1.find("re,im"));
    const auto data2 = b2.substr(b2.find("re,im"));
    CHECK(data1 == data2);
}

TEST_CASE("limit-set rendering writes a pixmap") {
    TempFile ppm("lam.ppm");
    const RunResult r =
        run_cli("limitset --a 4 --res 32 --nmax 60 --out " + ppm.path);
    CHECK(r.status == 0);
    const std::string bytes = slurp(ppm.path);
    const std::string head = "P6\n32 32\n255\n";
    CHECK(bytes.rfind(head, 0) == 0);
    CHECK(bytes.size() == head.size() + 3u * 32u * 32u);
}

TEST_CASE("domain validation and self checks pass at the reference parameter") {
    const RunResult klein = run_cli("klein validate --samples 2000");
    CHECK(klein.status == 0);
    CHECK_THAT(klein.output, ContainsSubstring("disjointness: PASS"));
    CHECK_THAT(klein.output, ContainsSubstring("coverage: PASS"));
    CHECK_THAT(klein.output, ContainsSubstring("involution: PASS"));

    const RunResult chk = run_cli("check --a 4");
    CHECK(chk.status == 0);
    CHECK_THAT(chk.output, ContainsSubstring("OK"));
    CHECK_THAT(chk.output, !ContainsSubstring("FAIL"));
}
