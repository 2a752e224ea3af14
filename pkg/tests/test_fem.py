import numpy as np
import pytest

import compoflow as cf
from compoflow.errors import AssemblyError, DomainError
from compoflow.fem import (
    FemSpace,
    LevelSetState,
    OperatorCache,
    assemble_operators,
    be1_fem_step,
    build_structured_mesh,
    contour_length,
    evaluate_structured,
    hm1_fem_step,
    interface_measures,
    l2_error,
    region_symmetric_difference,
    signed_distance_circle,
    supg_tau,
    vortex_velocity,
    write_contour_csv,
    write_vtk,
    zalesak_setup,
)
from compoflow.fem.fields import VelocityField, slotted_disk_distance


def zero_velocity():
    return VelocityField(
        evaluate=lambda t, p: np.zeros_like(np.atleast_2d(p)),
        label="zero",
        time_dependent=False,
    )


def constant_velocity(ux, uy):
    def evaluate(t, p):
        p = np.atleast_2d(p)
        return np.column_stack([np.full(len(p), ux), np.full(len(p), uy)])

    return VelocityField(evaluate=evaluate, label="const", time_dependent=False)


class TestMesh:
    def test_counts_and_h(self):
        mesh = build_structured_mesh(4)
        assert mesh.num_vertices == 25
        assert mesh.num_triangles == 32
        assert mesh.h == pytest.approx(np.sqrt(2) / 4)
        assert mesh.structured_n == 4

    def test_areas_positive_and_sum_to_one(self):
        mesh = build_structured_mesh(7)
        areas = mesh.element_areas()
        assert np.all(areas > 0)  # counter-clockwise orientation
        assert np.sum(areas) == pytest.approx(1.0, abs=1e-14)

    def test_boundary_vertices(self):
        mesh = build_structured_mesh(5)
        assert len(mesh.boundary) == 4 * 5
        for v in mesh.boundary:
            x, y = mesh.vertices[v]
            assert min(x, y, 1 - x, 1 - y) == pytest.approx(0.0, abs=1e-15)

    def test_invalid_subdivisions(self):
        with pytest.raises(DomainError):
            build_structured_mesh(0)

    def test_space_degree_guard(self):
        with pytest.raises(DomainError):
            FemSpace(build_structured_mesh(2), degree=2)

    def test_interpolate_linear(self):
        space = FemSpace(build_structured_mesh(3))
        dofs = space.interpolate(lambda p: p[:, 0] + 2 * p[:, 1])
        assert dofs == pytest.approx(
            space.mesh.vertices[:, 0] + 2 * space.mesh.vertices[:, 1]
        )


class TestSupgTau:
    def test_advective_regime(self):
        assert supg_tau(0.1, 2.0, 0.5, 1e-10) == pytest.approx(0.025)

    def test_vanishing_velocity_floor(self):
        # denominator floors at tol/h, keeping tau finite
        assert supg_tau(0.1, 0.0, 0.5, 1e-10) == pytest.approx(0.5 * 0.1 ** 2 / 1e-10)

    def test_scaling_in_c(self):
        assert supg_tau(0.2, 1.0, 1.0, 1e-10) == 2 * supg_tau(0.2, 1.0, 0.5, 1e-10)


class TestAssembly:
    def test_mass_total_is_domain_area(self):
        space = FemSpace(build_structured_mesh(6))
        ops = assemble_operators(space, zero_velocity(), 0.0)
        assert ops.M.sum() == pytest.approx(1.0, abs=1e-12)

    def test_zero_velocity_gives_standard_mass(self):
        space = FemSpace(build_structured_mesh(1))
        ops = assemble_operators(space, zero_velocity(), 0.0)
        M = ops.M.toarray()
        # vertex 0 sits in both triangles: diagonal entry 2 * area/6
        assert M[0, 0] == pytest.approx(1.0 / 6.0, abs=1e-12)
        assert np.max(np.abs(M - M.T)) < 1e-14
        assert np.max(np.abs(ops.K.toarray())) < 1e-14

    def test_transport_annihilates_constants(self):
        space = FemSpace(build_structured_mesh(8))
        ops = assemble_operators(space, constant_velocity(0.7, -0.3), 0.0)
        ones = np.ones(space.num_dofs)
        assert np.max(np.abs(ops.K @ ones)) < 1e-13

    def test_supg_skews_mass(self):
        space = FemSpace(build_structured_mesh(4))
        ops = assemble_operators(space, constant_velocity(1.0, 0.0), 0.0, C=0.5)
        M = ops.M.toarray()
        assert np.max(np.abs(M - M.T)) > 1e-6  # streamline test functions

    def test_weak_transport_of_linear_field(self):
        # (u . grad phi, psi_i) for phi = x, u = (1, 0) integrates psi_i
        space = FemSpace(build_structured_mesh(6))
        galerkin = assemble_operators(space, constant_velocity(1.0, 0.0), 0.0, C=0.0)
        x = space.mesh.vertices[:, 0]
        mass_action = galerkin.M @ np.ones(space.num_dofs)
        assert galerkin.K @ x == pytest.approx(mass_action, abs=1e-12)

    def test_degenerate_element_rejected(self):
        mesh = build_structured_mesh(2)
        bad_vertices = mesh.vertices.copy()
        bad_vertices[0] = bad_vertices[1]  # collapse one edge
        from compoflow.fem.mesh import TriMesh

        bad = TriMesh(
            vertices=bad_vertices,
            triangles=mesh.triangles,
            h=mesh.h,
            boundary=mesh.boundary,
        )
        with pytest.raises(AssemblyError):
            assemble_operators(FemSpace(bad), zero_velocity(), 0.0)

    def test_vortex_velocity_vanishes_on_boundary(self):
        velocity = vortex_velocity(4.0)
        pts = np.array([[0.0, 0.3], [1.0, 0.7], [0.2, 0.0], [0.9, 1.0]])
        assert np.max(np.abs(velocity(0.3, pts))) < 1e-14

    def test_vortex_time_reversal(self):
        velocity = vortex_velocity(4.0)
        pts = np.array([[0.3, 0.6]])
        early = velocity(1.0, pts)
        late = velocity(3.0, pts)
        assert late == pytest.approx(-early, abs=1e-14)


class TestStepping:
    def setup_method(self):
        self.space = FemSpace(build_structured_mesh(8))
        self.velocity = constant_velocity(0.4, 0.1)
        self.cache = OperatorCache(self.space, self.velocity)

    def test_be1_preserves_constants(self):
        state = LevelSetState(np.full(self.space.num_dofs, 2.5), self.space)
        out = be1_fem_step(state, self.cache, 0.05)
        assert out.dofs == pytest.approx(state.dofs, abs=1e-11)
        assert out.t == pytest.approx(0.05)

    def test_hm1_preserves_constants(self):
        state = LevelSetState(np.full(self.space.num_dofs, -1.0), self.space)
        out = hm1_fem_step(state, self.cache, 0.02)
        assert out.dofs == pytest.approx(state.dofs, abs=1e-11)

    def test_be1_matches_dense_solve(self):
        ops = self.cache.operators(0.0)
        rng = np.random.default_rng(11)
        a = rng.standard_normal(self.space.num_dofs)
        dt = 0.03
        expected = np.linalg.solve((ops.M + dt * ops.K).toarray(), ops.M @ a)
        state = be1_fem_step(LevelSetState(a, self.space), self.cache, dt)
        assert state.dofs == pytest.approx(expected, abs=1e-10)

    def test_hm1_matches_dense_formula(self):
        ops = self.cache.operators(0.0)
        Minv_K = np.linalg.solve(ops.M.toarray(), ops.K.toarray())
        rng = np.random.default_rng(5)
        a = rng.standard_normal(self.space.num_dofs)
        dt = 0.01
        w1 = Minv_K @ a
        expected = a - (dt / 2.0) * (w1 + Minv_K @ (a - dt * w1))
        state = hm1_fem_step(LevelSetState(a, self.space), self.cache, dt)
        assert state.dofs == pytest.approx(expected, abs=1e-10)

    def test_complex_step_scaling(self):
        ops = self.cache.operators(0.0)
        a = self.space.interpolate(signed_distance_circle((0.5, 0.5), 0.2))
        dt = 0.02 + 0.01j
        expected = np.linalg.solve(
            (ops.M + dt * ops.K).toarray().astype(complex), ops.M @ a
        )
        state = be1_fem_step(
            LevelSetState(a.astype(complex), self.space), self.cache, dt
        )
        assert np.max(np.abs(state.dofs - expected)) < 1e-10

    def test_frozen_velocity_single_assembly(self):
        state = LevelSetState(
            self.space.interpolate(signed_distance_circle((0.5, 0.5), 0.2)),
            self.space,
        )
        for _ in range(5):
            state = be1_fem_step(state, self.cache, 0.01)
        assert self.cache.assembly_count == 1
        assert self.cache.factorization_count == 1

    def test_time_dependent_velocity_reassembles(self):
        cache = OperatorCache(self.space, vortex_velocity(4.0))
        cache.operators(0.0)
        cache.operators(0.1)
        cache.operators(0.1)
        assert cache.assembly_count == 2

    def test_composed_fem_flow_projects_real(self):
        flow = cf.build_fem_flow("BE2", self.space, self.velocity)
        a = self.space.interpolate(signed_distance_circle((0.5, 0.5), 0.2))
        out = flow.step(0.0, a, 0.02)
        assert np.isrealobj(out)

    def test_rigid_rotation_transports_disk(self):
        space = FemSpace(build_structured_mesh(32))
        velocity, phi0 = zalesak_setup(4.0)
        flow = cf.build_fem_flow("BE2", space, velocity, C=0.5)
        y = space.interpolate(signed_distance_circle((0.5, 0.75), 0.15))
        N = 25  # quarter revolution: disk center moves (0.5,0.75)->(0.25,0.5)
        for n in range(N):
            y = flow.step(n * 0.04, y, 0.04)
        rotated = space.interpolate(signed_distance_circle((0.25, 0.5), 0.15))
        assert l2_error(y, rotated, space) < 0.02
        area, _ = interface_measures(y, space)
        assert area == pytest.approx(np.pi * 0.15 ** 2, rel=0.05)


class TestMeasures:
    def setup_method(self):
        self.space = FemSpace(build_structured_mesh(64))

    def test_l2_error_of_linear_field_exact(self):
        x = self.space.mesh.vertices[:, 0]
        zero = np.zeros_like(x)
        assert l2_error(x, zero, self.space) == pytest.approx(
            np.sqrt(1.0 / 3.0), abs=1e-13
        )

    def test_l2_error_shape_guard(self):
        with pytest.raises(DomainError):
            l2_error(np.zeros(3), np.zeros(3), self.space)

    def test_circle_area_and_contour(self):
        dofs = self.space.interpolate(signed_distance_circle((0.5, 0.5), 0.15))
        area, segments = interface_measures(dofs, self.space)
        assert area == pytest.approx(np.pi * 0.15 ** 2, abs=2e-4)
        assert contour_length(segments) == pytest.approx(2 * np.pi * 0.15, abs=5e-3)

    def test_all_positive_field_empty_interface(self):
        dofs = np.ones(self.space.num_dofs)
        area, segments = interface_measures(dofs, self.space)
        assert area == 0.0
        assert segments == []

    def test_halfplane_area_exact(self):
        dofs = self.space.mesh.vertices[:, 0] - 0.5
        area, segments = interface_measures(dofs, self.space)
        assert area == pytest.approx(0.5, abs=1e-12)
        assert contour_length(segments) == pytest.approx(1.0, abs=1e-12)

    def test_structured_evaluation_reproduces_linears(self):
        dofs = self.space.interpolate(lambda p: 3 * p[:, 0] - p[:, 1] + 0.2)
        rng = np.random.default_rng(2)
        pts = rng.uniform(0, 1, size=(200, 2))
        vals = evaluate_structured(dofs, self.space, pts)
        assert vals == pytest.approx(3 * pts[:, 0] - pts[:, 1] + 0.2, abs=1e-13)

    def test_structured_evaluation_requires_grid_mesh(self):
        from compoflow.fem.mesh import TriMesh

        mesh = self.space.mesh
        unstructured = TriMesh(
            vertices=mesh.vertices,
            triangles=mesh.triangles,
            h=mesh.h,
            boundary=mesh.boundary,
        )
        with pytest.raises(DomainError):
            evaluate_structured(np.zeros(mesh.num_vertices), FemSpace(unstructured), np.array([[0.5, 0.5]]))

    def test_symmetric_difference_of_shifted_strips(self):
        a = self.space.mesh.vertices[:, 0] - 0.4
        b = self.space.mesh.vertices[:, 0] - 0.6
        sym = region_symmetric_difference(a, b, self.space)
        assert sym == pytest.approx(0.2, abs=1e-3)

    def test_symmetric_difference_identical_fields(self):
        dofs = self.space.interpolate(signed_distance_circle((0.5, 0.5), 0.2))
        assert region_symmetric_difference(dofs, dofs, self.space) == 0.0

    def test_slotted_disk_geometry(self):
        phi = slotted_disk_distance()
        inside = np.array([[0.4, 0.75], [0.6, 0.75], [0.5, 0.88]])
        in_slot = np.array([[0.5, 0.7], [0.5, 0.62], [0.5, 0.84]])
        assert np.all(phi(inside) < 0)
        assert np.all(phi(in_slot) > 0)
        # slotted area: disk minus the strip |x-0.5| < w/2 capped at y = 0.85
        space = FemSpace(build_structured_mesh(200))
        area, _ = interface_measures(space.interpolate(phi), space)
        R, w = 0.15, 0.05
        disk = np.pi * R ** 2
        x = w / 2.0
        half_chord_integral = x * np.sqrt(R * R - x * x) + R * R * np.arcsin(x / R)
        slot = w * 0.1 + half_chord_integral
        assert area == pytest.approx(disk - slot, abs=5e-4)


class TestVtkIo:
    def test_vtk_layout(self, tmp_path):
        mesh = build_structured_mesh(2)
        path = tmp_path / "field.vtk"
        write_vtk(path, mesh, {"phi": np.arange(mesh.num_vertices, dtype=float)})
        lines = path.read_text().splitlines()
        assert lines[0].startswith("# vtk DataFile")
        assert "DATASET UNSTRUCTURED_GRID" in lines
        assert any(l.startswith("POINTS 9") for l in lines)
        assert any(l.startswith("CELLS 8") for l in lines)
        assert any(l.startswith("POINT_DATA 9") for l in lines)

    def test_contour_csv(self, tmp_path):
        path = tmp_path / "contour.csv"
        write_contour_csv(path, [((0.0, 0.0), (1.0, 0.5))])
        body = path.read_text().strip().splitlines()
        assert body[-1].split(",") == ["0", "0", "1", "0.5"]
