from __future__ import annotations

import json

import numpy as np
import pytest

from geoagent.kits.perception import MockExpertBackend
from geoagent.tools import (
    FILE_HALLUCINATION,
    INVALID_PARAMETERS,
    SYSTEM_ERROR,
    TOOL_HALLUCINATION,
    ToolContext,
    ToolRegistry,
    ToolSpec,
    ParamSpec,
    build_registry,
    ok_result,
)
from geoagent.workspace import Workspace

from conftest import make_georef, write_raster


@pytest.fixture
def ctx(tmp_path):
    ws = Workspace(tmp_path)
    (tmp_path / "manifest.json").write_text(json.dumps([
        {"image": "scene", "task": "classify", "prompt": None,
         "result": {"label": "Forest"}},
    ]))
    write_raster(tmp_path / "nir.tif", [[0.6, 0.4]], geo=make_georef())
    write_raster(tmp_path / "red.tif", [[0.2, 0.4]], geo=make_georef())
    write_raster(tmp_path / "scene.tif", [[1.0, 2.0]])
    return ToolContext(workspace=ws,
                       perception=MockExpertBackend(tmp_path / "manifest.json", ws))


@pytest.fixture
def registry(ctx):
    return build_registry(ctx)


class TestRegistration:
    def test_catalog_size(self, registry):
        assert len(registry) >= 60

    def test_listing_sorted(self, registry):
        names = [s.name for s in registry.list_specs()]
        assert names == sorted(names)

    def test_duplicate_name_rejected(self):
        reg = ToolRegistry()
        spec = ToolSpec(name="x", description="", params=())
        reg.register(spec, lambda a: ok_result(value=1))
        with pytest.raises(ValueError):
            reg.register(spec, lambda a: ok_result(value=2))

    def test_expected_tools_present(self, registry):
        for name in ("calculate_batch_ndvi", "lst_multi_channel", "mann_kendall_test",
                     "MSCN", "apply_cloud_mask", "get_filelist", "ATI",
                     "nasa_team_sea_ice_concentration", "detect_change_points",
                     "threshold_segmentation", "calc_batch_image_hotspot_tif"):
            assert name in registry


class TestClassification:
    def test_unknown_tool(self, registry):
        res = registry.call_tool("no_such_tool", {})
        assert res.is_error and res.error_class == TOOL_HALLUCINATION

    def test_missing_file(self, registry):
        res = registry.call_tool("calculate_batch_ndvi", {
            "nir_paths": ["missing.tif"], "red_paths": ["red.tif"],
            "output_dir": "out"})
        assert res.is_error and res.error_class == FILE_HALLUCINATION

    def test_unknown_argument_rejected(self, registry):
        res = registry.call_tool("mean", {"data": [1, 2], "bogus": 1})
        assert res.is_error and res.error_class == INVALID_PARAMETERS

    def test_missing_required_argument(self, registry):
        res = registry.call_tool("mean", {})
        assert res.is_error and res.error_class == INVALID_PARAMETERS

    def test_wrong_type(self, registry):
        res = registry.call_tool("kelvin_to_celsius", {"kelvin": "300"})
        assert res.is_error and res.error_class == INVALID_PARAMETERS

    def test_enum_violation(self, registry):
        res = registry.call_tool("calculate_mean_lst_by_ndvi", {
            "lst_paths": ["scene.tif"], "ndvi_paths": ["scene.tif"],
            "threshold": 0.2, "direction": "sideways"})
        assert res.is_error and res.error_class == INVALID_PARAMETERS

    def test_domain_error_is_invalid_parameters(self, registry):
        res = registry.call_tool("mann_kendall_test", {"values": [1, 2]})
        assert res.is_error and res.error_class == INVALID_PARAMETERS

    def test_wrong_array_element_type(self, registry):
        res = registry.call_tool("calculate_batch_ndvi", {
            "nir_paths": [3], "red_paths": ["red.tif"], "output_dir": "o"})
        assert res.is_error and res.error_class == INVALID_PARAMETERS

    def test_series_nulls_accepted_as_gaps(self, registry):
        res = registry.call_tool("sens_slope", {"values": [1.0, None, 5.0]})
        assert not res.is_error and res.value == 2.0

    def test_scalar_dataset_rejects_nulls(self, registry):
        res = registry.call_tool("mean", {"data": [1.0, None]})
        assert res.is_error and res.error_class == INVALID_PARAMETERS

    def test_workspace_escape_is_invalid_parameters(self, registry):
        res = registry.call_tool("lst_multi_channel", {
            "band31_path": "scene.tif", "band32_path": "scene.tif",
            "output_path": "../../../etc/pwned.tif"})
        assert res.is_error and res.error_class == INVALID_PARAMETERS

    def test_missing_mock_fixture_is_system_error(self, registry):
        res = registry.call_tool("SAM2", {"image_path": "scene.tif"})
        assert res.is_error and res.error_class == SYSTEM_ERROR

    def test_every_error_carries_one_class(self, registry):
        bad_calls = [
            ("ghost_tool", {}),
            ("mean", {"data": "not a list"}),
            ("calculate_area", {"image_path": "victor.tif"}),
        ]
        for name, args in bad_calls:
            res = registry.call_tool(name, args)
            assert res.is_error
            assert res.error_class in (TOOL_HALLUCINATION, FILE_HALLUCINATION,
                                       INVALID_PARAMETERS, SYSTEM_ERROR)


class TestDispatch:
    def test_valid_ndvi_call(self, registry, tmp_path):
        res = registry.call_tool("calculate_batch_ndvi", {
            "nir_paths": ["nir.tif"], "red_paths": ["red.tif"],
            "output_dir": "q1"})
        assert not res.is_error
        assert "Result saved at" in res.text
        assert res.files and res.files[0].endswith("ndvi_nir.tif")

    def test_scalar_tool(self, registry):
        res = registry.call_tool("kelvin_to_celsius", {"kelvin": 273.15})
        assert not res.is_error and res.value == 0.0

    def test_mock_expert_classify(self, registry):
        res = registry.call_tool("MSCN", {"image_path": "scene.tif"})
        assert not res.is_error and res.value == {"label": "Forest"}

    def test_errors_are_data_not_exceptions(self, registry):
        # a long mixed sequence must never raise
        for name, args in [("nope", {}), ("mean", {"data": []}),
                           ("division", {"a": 1, "b": 0})]:
            res = registry.call_tool(name, args)
            assert res.is_error

    def test_optional_params_defaulted(self, registry):
        res = registry.call_tool("calc_batch_image_mean", {
            "image_paths": ["scene.tif"]})
        assert not res.is_error and res.value == [1.5]

    def test_georef_preserved_through_tool(self, registry, tmp_path):
        from geoagent.raster import load_raster

        res = registry.call_tool("calculate_batch_ndvi", {
            "nir_paths": ["nir.tif"], "red_paths": ["red.tif"],
            "output_dir": "geo"})
        out = load_raster(res.files[0])
        assert out.geo == make_georef()

    def test_batch_equals_per_item_kernel(self, ctx, registry, tmp_path):
        import numpy as np

        from geoagent.kits.index import compute_index
        from geoagent.raster import load_raster

        rng = np.random.default_rng(13)
        nir_paths, red_paths = [], []
        for i in range(3):
            write_raster(tmp_path / f"bn{i}.tif", rng.uniform(0.2, 0.9, (4, 4)))
            write_raster(tmp_path / f"br{i}.tif", rng.uniform(0.05, 0.4, (4, 4)))
            nir_paths.append(f"bn{i}.tif")
            red_paths.append(f"br{i}.tif")
        res = registry.call_tool("calculate_batch_ndvi", {
            "nir_paths": nir_paths, "red_paths": red_paths, "output_dir": "bat"})
        assert not res.is_error and len(res.files) == 3
        for i, out_path in enumerate(res.files):
            single = compute_index("ndvi", {
                "nir": load_raster(tmp_path / f"bn{i}.tif"),
                "red": load_raster(tmp_path / f"br{i}.tif")})
            assert np.array_equal(load_raster(out_path).data, single.data)

    def test_empty_batch_rejected(self, registry):
        res = registry.call_tool("calculate_batch_ndvi", {
            "nir_paths": [], "red_paths": [], "output_dir": "x"})
        assert res.is_error and res.error_class == INVALID_PARAMETERS

    def test_tif_difference_antisymmetric(self, ctx, registry, tmp_path):
        import numpy as np

        from geoagent.raster import load_raster

        rng = np.random.default_rng(77)
        write_raster(tmp_path / "da.tif", rng.normal(size=(3, 3)))
        write_raster(tmp_path / "db.tif", rng.normal(size=(3, 3)))
        fwd = registry.call_tool("calculate_tif_difference", {
            "image_a_path": "da.tif", "image_b_path": "db.tif",
            "output_path": "d/fwd.tif"})
        rev = registry.call_tool("calculate_tif_difference", {
            "image_a_path": "db.tif", "image_b_path": "da.tif",
            "output_path": "d/rev.tif"})
        a = load_raster(fwd.files[0]).data
        b = load_raster(rev.files[0]).data
        assert np.allclose(a, -b, atol=1e-7)

    def test_subtract_is_minuend_first(self, ctx, registry, tmp_path):
        from geoagent.raster import load_raster

        write_raster(tmp_path / "sa.tif", [[5.0]])
        write_raster(tmp_path / "sb.tif", [[2.0]])
        diff = registry.call_tool("subtract", {
            "image_a_path": "sa.tif", "image_b_path": "sb.tif",
            "output_path": "d/sub.tif"})
        assert load_raster(diff.files[0]).data.ravel()[0] == 3.0
        tifd = registry.call_tool("calculate_tif_difference", {
            "image_a_path": "sa.tif", "image_b_path": "sb.tif",
            "output_path": "d/tifd.tif"})
        assert load_raster(tifd.files[0]).data.ravel()[0] == -3.0
