// SPDX-License-Identifier: Apache-2.0
#include <sstream>

#include <gtest/gtest.h>

#include "rsr/core/csv.hpp"
#include "rsr/core/errors.hpp"
#include "rsr/core/score_table.hpp"

namespace rsr {
namespace {

TEST(Csv, SplitHonoursQuotes) {
    auto f = csv::split_line(R"(a,"b,c","say ""hi""",)");
    ASSERT_EQ(f.size(), 4u);
    EXPECT_EQ(f[1], "b,c");
    EXPECT_EQ(f[2], "say \"hi\"");
    EXPECT_EQ(f[3], "");
}

TEST(Csv, EscapeJoinRoundTrip) {
    std::vector<std::string> fields{"plain", "with,comma", "with\"quote", ""};
    EXPECT_EQ(csv::split_line(csv::join(fields)), fields);
    EXPECT_EQ(csv::escape("plain"), "plain");
}

TEST(Csv, FormatRealRoundTrips) {
    for (double v : {0.1, 1.0 / 3.0, 2.999, 1e-300, -7.25, 123456789.0}) {
        EXPECT_EQ(csv::parse_real(csv::format_real(v), "x"), v);
    }
    EXPECT_EQ(csv::format_fixed(0.8555, 3), "0.856");
}

TEST(Csv, ParseRealRejectsJunk) {
    EXPECT_THROW(csv::parse_real("1.5x", "loc"), InputError);
    EXPECT_THROW(csv::parse_real("", "loc"), InputError);
    EXPECT_DOUBLE_EQ(csv::parse_real(" +2.5 ", "loc"), 2.5);
}

TEST(Csv, ReadTracksCommentsAndLines) {
    std::istringstream in("# note one\na,b\n\n1,2\n3,4\n");
    auto doc = csv::read(in, "t.csv");
    EXPECT_EQ(doc.comments, std::vector<std::string>{"note one"});
    EXPECT_EQ(doc.header, (std::vector<std::string>{"a", "b"}));
    ASSERT_EQ(doc.rows.size(), 2u);
    EXPECT_EQ(doc.line_numbers[0], 4u);
    EXPECT_EQ(doc.line_numbers[1], 5u);
}

TEST(Csv, ReadRejectsRaggedRows) {
    std::istringstream in("a,b\n1,2,3\n");
    try {
        csv::read(in, "t.csv");
        FAIL();
    } catch (const InputError& e) {
        EXPECT_EQ(e.location(), "t.csv:2");
    }
}

TEST(ScoreTable, ColumnListsEveryMissingCell) {
    ScoreTable t("s");
    t.set("a", "m", 1.0);
    t.add_teacher("b");
    t.add_teacher("c");
    std::vector<std::string> teachers{"a", "b", "c"};
    try {
        t.column("m", teachers);
        FAIL();
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("b"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("c"), std::string::npos);
    }
    std::vector<std::string> just_a{"a"};
    EXPECT_EQ(t.column("m", just_a), std::vector<double>{1.0});
}

TEST(ScoreTable, ReadAveragesRepeatedRowsAndKeepsProvenance) {
    std::istringstream in(
        "# provenance: external-fixture\n"
        "student,teacher,rsr,acc\n"
        "s1,t1,2.0,0.5\n"
        "s1,t1,4.0,\n"
        "s1,t2,1.0,0.25\n"
        "s2,t1,7.0,1.0\n");
    auto tables = read_score_tables(in, "scores.csv");
    ASSERT_EQ(tables.size(), 2u);
    EXPECT_EQ(tables[0].student_id(), "s1");
    EXPECT_EQ(tables[0].get("t1", "rsr"), 3.0);
    EXPECT_EQ(tables[0].get("t1", "acc"), 0.5);
    EXPECT_EQ(tables[0].teachers(), (std::vector<std::string>{"t1", "t2"}));
    EXPECT_EQ(tables[0].provenance("rsr"), Provenance::ExternalFixture);
    EXPECT_FALSE(tables[1].get("t2", "rsr").has_value());
}

TEST(ScoreTable, WriteReadRoundTrip) {
    ScoreTable t("s");
    t.set("a", "m1", 0.1);
    t.set("b", "m1", 1.0 / 3.0);
    t.set("a", "m2", 2.0);
    std::vector<ScoreTable> tables{t};
    std::ostringstream out;
    write_score_tables(out, tables, {"generated"});
    std::istringstream in(out.str());
    auto back = read_score_tables(in, "rt.csv");
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back[0].get("b", "m1"), 1.0 / 3.0);
    EXPECT_FALSE(back[0].get("b", "m2").has_value());
}

TEST(ScoreTable, BadHeaderAndBadCell) {
    std::istringstream bad_header("teacher,student,m\nx,y,1\n");
    EXPECT_THROW(read_score_tables(bad_header, "h.csv"), InputError);
    std::istringstream bad_cell("student,teacher,m\ns,t,abc\n");
    EXPECT_THROW(read_score_tables(bad_cell, "c.csv"), InputError);
}

} // namespace
} // namespace rsr
