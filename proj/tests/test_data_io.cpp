#include <sstream>

#include "doctest.h"

#include "covshift/data_io.hpp"
#include "covshift/error.hpp"
#include "covshift/synth.hpp"

using namespace covshift;

namespace {

std::string error_of(const std::string& text) {
    std::istringstream in(text);
    try {
        read_samples_csv(in);
    } catch (const DataError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("round trip is exact") {
    GeneratorSpec g;
    g.kind = GeneratorKind::Manifold;
    g.d = 2;
    g.n_p = 50;
    g.n_q = 70;
    g.anchor = manifold_point();
    g.seed = 17;
    const SampleSet s = generate(g);
    std::stringstream buf;
    write_samples_csv(buf, s, "seed 17");
    CHECK(buf.str().rfind("# seed 17\nx_1,x_2,x_3,x_4,x_5,y,origin\n", 0) == 0);
    const SampleSet back = read_samples_csv(buf);
    REQUIRE(back.size() == s.size());
    CHECK(back.ambient_dim() == 5);
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(back.y(i) == s.y(i));
        CHECK(back.origin(i) == s.origin(i));
        for (std::size_t j = 0; j < 5; ++j) CHECK(back.x(i)[j] == s.x(i)[j]);
    }
}

TEST_CASE("comments, blank lines, whitespace and CRLF are accepted") {
    std::istringstream in("# a\n\nx_1,y,origin\r\n 0.5 , 1e-3,P\r\n# mid\n-2,+3,Q\n");
    const SampleSet s = read_samples_csv(in);
    REQUIRE(s.size() == 2);
    CHECK(s.x(0)[0] == 0.5);
    CHECK(s.y(0) == 0.001);
    CHECK(s.origin(1) == Origin::Target);
    CHECK(s.y(1) == 3.0);
}

TEST_CASE("malformed rows name their line") {
    CHECK(error_of("") == "CSV input has no header line");
    CHECK(error_of("a,b\n").rfind("line 1:", 0) == 0);
    CHECK(error_of("x_2,y,origin\n").rfind("line 1:", 0) == 0);
    CHECK(error_of("x_1,y,origin\n1,2,P\n1,2\n").rfind("line 3:", 0) == 0);
    CHECK(error_of("x_1,y,origin\n1,abc,P\n").rfind("line 2: bad response", 0) == 0);
    CHECK(error_of("x_1,y,origin\nnan,1,P\n").rfind("line 2: bad number", 0) == 0);
    CHECK(error_of("# c\nx_1,y,origin\n1,1,R\n").rfind("line 3: origin", 0) == 0);
    CHECK_THROWS_AS(read_samples_csv_file("/nonexistent/file.csv"), DataError);
}

TEST_CASE("number lists") {
    CHECK(parse_number_list("0.1, 0.2,3") == std::vector<double>{0.1, 0.2, 3.0});
    CHECK(parse_number_list("-1") == std::vector<double>{-1.0});
    CHECK_THROWS_AS(parse_number_list("1,,2"), InputError);
    CHECK_THROWS_AS(parse_number_list("1;2"), InputError);
}
