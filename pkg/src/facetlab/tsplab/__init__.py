"""Travelling-salesman case study: tour points, TSP_H/SD models, Set-3 families."""

from .instance import AtspInstance, load_bundled, load_instance, parse_tsplib_atsp, read_tsplib_atsp
from .models import (build_hbeta, build_sd, build_tsp_h, build_tsp_h_star, hbeta_arcs, hbeta_point,
                     indegree_equalities, lp_bound, sd_solution, tsp_h_equalities, tsp_h_linking)
from .set3 import (FAMILIES, Set3Family, Set3Report, Set3Result, case_table, family_rows,
                   set3_constraint, set3_members, tour_polytope_dimension, validate_set3)
from .tours import Tour, TourPoint, TspSpace, enumerate_tours, tour_to_point, tour_vertex_set

__all__ = [
    "AtspInstance", "load_bundled", "load_instance", "parse_tsplib_atsp", "read_tsplib_atsp",
    "build_hbeta", "build_sd", "build_tsp_h", "build_tsp_h_star", "hbeta_arcs", "hbeta_point",
    "indegree_equalities", "lp_bound", "sd_solution", "tsp_h_equalities", "tsp_h_linking",
    "FAMILIES", "Set3Family", "Set3Report", "Set3Result", "case_table", "family_rows",
    "set3_constraint", "set3_members", "tour_polytope_dimension", "validate_set3",
    "Tour", "TourPoint", "TspSpace", "enumerate_tours", "tour_to_point", "tour_vertex_set",
]
