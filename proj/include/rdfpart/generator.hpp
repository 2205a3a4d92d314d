#ifndef RDFPART_GENERATOR_HPP
#define RDFPART_GENERATOR_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace rdfpart {

/// Deterministic university-domain dataset in the LUBM mold, sized by the
/// university count. Shapes are wired so the shipped chain/star workload
/// queries all have answers: students advised by faculty who work for
/// departments that are sub-organizations of universities, a chair per
/// department, and degree links that sometimes stay inside the home
/// university.
struct GeneratorSpec {
    std::uint32_t universities = 1;
    std::uint64_t seed = 0;
    /// When positive, adds a single hub subject whose out-edges make up this
    /// fraction of the final dataset (load-skew studies).
    double hub_fraction = 0.0;
};

namespace gen_detail {

constexpr const char* kUb = "http://swat.cse.lehigh.edu/onto/univ-bench.owl#";
constexpr const char* kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

constexpr int kDepartmentsPerUniversity = 3;
constexpr int kFacultyPerDepartment = 5;
constexpr int kCoursesPerFaculty = 2;
constexpr int kUndergradsPerDepartment = 20;
constexpr int kGradsPerDepartment = 6;

}  // namespace gen_detail

inline std::string generate_synthetic(const GeneratorSpec& spec) {
    using namespace gen_detail;
    std::mt19937_64 rng(spec.seed);
    std::string out;
    std::vector<std::string> people;  // hub targets

    auto emit = [&](const std::string& s, const std::string& p, const std::string& o) {
        out += '<';
        out += s;
        out += "> <";
        out += p;
        out += "> <";
        out += o;
        out += "> .\n";
    };
    auto emit_literal = [&](const std::string& s, const std::string& p, const std::string& token) {
        out += '<';
        out += s;
        out += "> <";
        out += p;
        out += "> ";
        out += token;
        out += " .\n";
    };
    auto ub = [&](const char* local) { return std::string(kUb) + local; };
    auto univ_iri = [](std::uint32_t i) {
        return "http://www.University" + std::to_string(i) + ".edu";
    };
    auto dept_iri = [](std::uint32_t univ, int dept) {
        return "http://www.Department" + std::to_string(dept) + ".University" +
               std::to_string(univ) + ".edu";
    };
    auto prof_iri = [&](std::uint32_t univ, int dept, int prof) {
        return dept_iri(univ, dept) + "/Professor" + std::to_string(prof);
    };

    std::size_t triple_count = 0;
    auto emit_counted = [&](const std::string& s, const std::string& p, const std::string& o) {
        emit(s, p, o);
        ++triple_count;
    };

    const std::string type = kRdfType;
    for (std::uint32_t i = 0; i < spec.universities; ++i) {
        std::string univ = univ_iri(i);
        emit_counted(univ, type, ub("University"));
        for (int d = 0; d < kDepartmentsPerUniversity; ++d) {
            std::string dept = dept_iri(i, d);
            emit_counted(dept, type, ub("Department"));
            emit_counted(dept, ub("subOrganizationOf"), univ);

            std::vector<std::string> faculty, courses;
            for (int f = 0; f < kFacultyPerDepartment; ++f) {
                std::string prof = dept + "/Professor" + std::to_string(f);
                faculty.push_back(prof);
                people.push_back(prof);
                emit_counted(prof, type, ub("Faculty"));
                if (f == 0) emit_counted(prof, type, ub("Chair"));
                emit_counted(prof, ub("worksFor"), dept);
                for (int c = 0; c < kCoursesPerFaculty; ++c) {
                    std::string course =
                        dept + "/Course" + std::to_string(f * kCoursesPerFaculty + c);
                    courses.push_back(course);
                    emit_counted(course, type, ub("Course"));
                    emit_counted(prof, ub("teacherOf"), course);
                }
            }

            auto emit_student = [&](const std::string& student, const char* cls, bool anchor) {
                people.push_back(student);
                emit_counted(student, type, ub(cls));
                emit_counted(student, ub("memberOf"), dept);
                // the first student of each kind is pinned to the first
                // professor and their course so the chain/triangle queries
                // always match; a slice of the others is advised from another
                // department or university, which keeps the entity graph from
                // decomposing into disjoint clusters
                std::size_t adv = anchor ? 0 : rng() % faculty.size();
                bool foreign_advisor = !anchor && rng() % 100 < 15;
                if (foreign_advisor) {
                    auto fu = static_cast<std::uint32_t>(rng() % spec.universities);
                    int fd = static_cast<int>(rng() % kDepartmentsPerUniversity);
                    int ff = static_cast<int>(rng() % kFacultyPerDepartment);
                    emit_counted(student, ub("advisor"), prof_iri(fu, fd, ff));
                } else {
                    emit_counted(student, ub("advisor"), faculty[adv]);
                }
                std::size_t c1 = anchor ? adv * kCoursesPerFaculty
                                        : rng() % courses.size();
                std::size_t c2 = (c1 + 1 + rng() % (courses.size() - 1)) % courses.size();
                emit_counted(student, ub("takesCourse"), courses[c1]);
                emit_counted(student, ub("takesCourse"), courses[c2]);
                std::uint32_t degree_univ =
                    anchor ? i : static_cast<std::uint32_t>(rng() % spec.universities);
                emit_counted(student, ub("undergraduateDegreeFrom"), univ_iri(degree_univ));
                // registration records: department-shared unit values, with a
                // per-university count. Universities end up with different
                // triple weight per vertex, the load-skew a vertex-balancing
                // graph partitioner does not see.
                int unit_edges = 8 * static_cast<int>(i % 3);
                for (int ue = 0; ue < unit_edges; ++ue) {
                    std::string unit =
                        "\"unit-u" + std::to_string(i) + "-d" + std::to_string(d) + "-" +
                        std::to_string(ue) + "\"";
                    emit_literal(student, ub("enrolledUnit"), unit);
                    ++triple_count;
                }
            };

            for (int u = 0; u < kUndergradsPerDepartment; ++u)
                emit_student(dept + "/UndergraduateStudent" + std::to_string(u), "Student", u == 0);
            for (int g = 0; g < kGradsPerDepartment; ++g)
                emit_student(dept + "/GraduateStudent" + std::to_string(g), "GraduateStudent",
                             g == 0);
        }
    }

    if (spec.hub_fraction > 0.0) {
        const std::string hub = "http://www.Registry.org/hub0";
        const std::string refers = "http://www.Registry.org/references";
        double f = std::min(spec.hub_fraction, 0.9);
        auto hub_edges = static_cast<std::size_t>(
            f * static_cast<double>(triple_count) / (1.0 - f) + 1.0);
        for (std::size_t h = 0; h < hub_edges; ++h) {
            if (h < people.size())
                emit(hub, refers, people[h]);
            else
                emit(hub, refers, "http://www.Registry.org/entry" + std::to_string(h));
        }
    }
    return out;
}

}  // namespace rdfpart

#endif  // RDFPART_GENERATOR_HPP
