#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "nmfinit/bench.hpp"

using namespace nmfinit;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(NMFINIT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "nmfinit_cli_tests";
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("help exits zero") {
        CHECK(run_cli("--help") == 0);
        CHECK(run_cli("init --help") == 0);
    }

    TEST_CASE("init on synthetic data succeeds") {
        CHECK(run_cli("init --synthetic 40,30,5,0.05 --rank 6 --init nnsvd-lrc --seed 3") == 0);
        CHECK(run_cli("init --synthetic 40,30,5,0.05 --rank 6 --init random") == 0);
    }

    TEST_CASE("input errors exit with code 2") {
        CHECK(run_cli("init --data /nonexistent.mtx --rank 4") == 2);
        CHECK(run_cli("init --rank 4") == 2);                       // no data source
        CHECK(run_cli("init --synthetic 10,8,3,0 --rank 99") == 2); // rank too large
        CHECK(run_cli("bogus-subcommand") == 2);
    }

    TEST_CASE("solve runs and writes a trace") {
        const fs::path trace = temp_dir() / "trace.csv";
        CHECK(run_cli("solve --synthetic 30,20,4,0.05 --rank 4 --solver mu --iters 5 --trace " +
                      trace.string()) == 0);
        std::ifstream in(trace);
        std::string header;
        std::getline(in, header);
        CHECK(header == "iteration,error");
        int lines = 0;
        std::string line;
        while (std::getline(in, line))
            if (!line.empty()) ++lines;
        CHECK(lines == 6);  // e_0 plus 5 iterations
    }

    TEST_CASE("bench consumes a config file and emits the csv") {
        const fs::path config = temp_dir() / "bench.json";
        std::ofstream out(config);
        out << R"({"dataset": {"kind": "synthetic", "m": 30, "n": 24, "rank": 5,
                    "noise": 0.05, "seed": 2, "name": "t"},
                   "initializers": ["nnsvd-lrc"], "ranks": [3, 5],
                   "post_steps": ["none"], "repetitions": 1, "seed": 7})";
        out.close();
        const fs::path csv = temp_dir() / "bench_out.csv";
        CHECK(run_cli("bench --config " + config.string() + " --out " + csv.string()) == 0);
        const auto rows = read_result_csv(csv.string());
        CHECK(rows.size() == 2);

        // flag overrides shrink the grid
        CHECK(run_cli("bench --config " + config.string() + " --out " + csv.string() +
                      " --ranks 4") == 0);
        CHECK(read_result_csv(csv.string()).size() == 1);
    }

    TEST_CASE("convert writes a csv matrix from an image directory") {
        const fs::path dir = temp_dir() / "imgs";
        fs::create_directories(dir);
        std::ofstream(dir / "x.pgm") << "P2\n2 2\n255\n1 2\n3 4\n";
        std::ofstream(dir / "y.pgm") << "P2\n2 2\n255\n5 6\n7 8\n";
        const fs::path out_csv = temp_dir() / "converted.csv";
        CHECK(run_cli("convert --data " + dir.string() + " --format pgm --out " +
                      out_csv.string()) == 0);
        const Dataset d = load_dense_images(out_csv.string(), ImageFormat::Csv);
        CHECK(d.matrix.rows() == 4);
        CHECK(d.matrix.cols() == 2);
    }
}
