"""Tests for CAM-guided attention, fusion positions and temporal heads."""

import numpy as np
import pytest

from src.configs.model import TamConfig
from src.core.exceptions import ConfigurationError, DimensionError
from src.services.model_service.backbone_wsl import InstrumentCAM
from src.services.model_service.cagtam import Cagtam, GuidedAttention, guided_attention, per_frame
from src.services.model_service.tam import tam_fuse
from src.services.model_service.temporal_head import LastFrameHead, TamHead, TemporalHeadFactory
from src.services.tensor_engine import functional as F
from src.services.tensor_engine import grad_check, precision
from src.services.tensor_engine.tensor import Tensor

CHANNELS = 4


def _inputs(rng, b=2, m=3, h=2, w=3):
    features = Tensor(rng.normal(size=(b, m, CHANNELS, h, w)))
    maps = Tensor(rng.normal(size=(b, m, 6, h, w)))
    return features, InstrumentCAM(cam=maps, logits=F.global_avg_pool(maps[:, -1]))


def _activate_guidance(module: Cagtam, gamma: float = 0.5) -> None:
    module.verb_attention.gamma.data[...] = gamma
    module.target_attention.gamma.data[...] = gamma


class TestGuidedAttention:
    def test_starts_as_unguided_projection(self):
        rng = np.random.default_rng(0)
        attention = GuidedAttention(CHANNELS, 10, 3, rng)
        features = Tensor(rng.normal(size=(2, CHANNELS, 2, 3)))
        out = attention(features, Tensor(rng.normal(size=(2, 6, 2, 3))))
        np.testing.assert_array_equal(out.numpy(), attention.value(features).numpy())

    def test_zero_context_attends_uniformly(self):
        rng = np.random.default_rng(1)
        attention = GuidedAttention(CHANNELS, 10, 3, rng)
        attention.key.weight.data[...] = 0.0
        attention.gamma.data[...] = 0.5
        features = Tensor(rng.normal(size=(2, CHANNELS, 2, 3)))

        out = attention(features, Tensor(np.zeros((2, 6, 2, 3)))).numpy()

        values = attention.value(features).numpy()
        expected = values + 0.5 * values.mean(axis=(-2, -1), keepdims=True)
        np.testing.assert_allclose(out, expected, atol=1e-6)

    def test_guidance_depends_on_cam(self):
        rng = np.random.default_rng(2)
        attention = GuidedAttention(CHANNELS, 10, 3, rng)
        attention.gamma.data[...] = 1.0
        features = Tensor(rng.normal(size=(1, CHANNELS, 2, 3)))
        cam = rng.normal(size=(1, 6, 2, 3))

        single = attention(features, Tensor(cam)).numpy()
        doubled = attention(features, Tensor(2.0 * cam)).numpy()

        assert np.abs(single - doubled).max() > 0.0

    def test_spatial_mismatch(self):
        rng = np.random.default_rng(3)
        attention = GuidedAttention(CHANNELS, 10, 3, rng)
        with pytest.raises(DimensionError, match="spatial"):
            attention(Tensor(np.zeros((1, CHANNELS, 2, 3))), Tensor(np.zeros((1, 6, 2, 2))))

    def test_clip_level_shapes(self):
        rng = np.random.default_rng(4)
        features, cam = _inputs(rng)
        verb, target = guided_attention(
            features,
            cam.cam,
            GuidedAttention(CHANNELS, 10, 3, rng),
            GuidedAttention(CHANNELS, 15, 3, rng),
        )
        assert verb.shape == (2, 3, 10, 2, 3)
        assert target.shape == (2, 3, 15, 2, 3)


class TestCagtamForward:
    @pytest.mark.parametrize("position", ["early", "late", "both"])
    @pytest.mark.parametrize("layers", [1, 2])
    def test_output_shapes(self, make_config, position, layers):
        rng = np.random.default_rng(0)
        module = Cagtam(make_config(position=position, layers=layers), CHANNELS, rng)
        out = module(*_inputs(rng))
        assert out.verb.h.shape == (2, 10, 2, 3)
        assert out.verb.y.shape == (2, 10)
        assert out.h_t.shape == (2, 15, 2, 3)
        assert out.y_t.shape == (2, 15)
        assert out.h_i.shape == (2, 6, 2, 3)
        np.testing.assert_allclose(out.y_t.numpy(), out.h_t.numpy().mean(axis=(-2, -1)), atol=1e-6)

    def test_late_fusion_window_of_one_scales_guided_map(self, make_config):
        rng = np.random.default_rng(1)
        module = Cagtam(make_config(position="late"), CHANNELS, rng).eval()
        _activate_guidance(module)
        features, cam = _inputs(rng, m=1)

        out = module(features, cam)

        guided = per_frame(module.verb_attention, features, cam.cam)
        gates = module.verb_head.stack.layers[0].gate(guided)
        np.testing.assert_array_equal(out.verb.h.numpy(), tam_fuse(guided, gates).numpy())

    def test_early_and_late_fusion_differ(self, make_config):
        features, cam = _inputs(np.random.default_rng(2))
        outs = []
        for position in ("early", "late"):
            module = Cagtam(make_config(position=position), CHANNELS, np.random.default_rng(7))
            _activate_guidance(module)
            outs.append(module(features, cam).verb.h.numpy())
        assert np.abs(outs[0] - outs[1]).max() > 0.0

    def test_only_the_verb_branch_sees_history(self, make_config):
        rng = np.random.default_rng(3)
        module = Cagtam(make_config(tam_targets=["verb"]), CHANNELS, rng).eval()
        _activate_guidance(module)
        features, cam = _inputs(rng)
        perturbed_features = features.numpy().copy()
        perturbed_cam = cam.cam.numpy().copy()
        perturbed_features[:, :-1] += rng.normal(size=perturbed_features[:, :-1].shape)
        perturbed_cam[:, :-1] += rng.normal(size=perturbed_cam[:, :-1].shape)

        a = module(features, cam)
        b = module(Tensor(perturbed_features), InstrumentCAM(Tensor(perturbed_cam), cam.logits))

        np.testing.assert_array_equal(a.h_i.numpy(), b.h_i.numpy())
        np.testing.assert_array_equal(a.h_t.numpy(), b.h_t.numpy())
        assert np.abs(a.verb.h.numpy() - b.verb.h.numpy()).max() > 0.0

    def test_attached_heads_fuse_instrument_and_target(self, make_config):
        rng = np.random.default_rng(4)
        module = Cagtam(make_config(tam_targets=["verb", "instrument", "target"]), CHANNELS, rng).eval()
        assert isinstance(module.instrument_head, TamHead)
        assert isinstance(module.target_head, TamHead)
        features, cam = _inputs(rng)
        perturbed_cam = cam.cam.numpy().copy()
        perturbed_cam[:, 0] += 1.0

        a = module(features, cam).h_i.numpy()
        b = module(features, InstrumentCAM(Tensor(perturbed_cam), cam.logits)).h_i.numpy()

        assert np.abs(a - b).max() > 0.0

    def test_single_frame_head_ignores_history(self, make_config):
        rng = np.random.default_rng(5)
        module = Cagtam(make_config(temporal_head="last_frame"), CHANNELS, rng)
        assert isinstance(module.verb_head, LastFrameHead)
        features, cam = _inputs(rng)
        single = module(Tensor(features.numpy()[:, -1:]), InstrumentCAM(cam.cam[:, -1:], cam.logits))
        full = module(features, cam)
        np.testing.assert_array_equal(single.verb.h.numpy(), full.verb.h.numpy())

    def test_misaligned_cam(self, config):
        rng = np.random.default_rng(6)
        module = Cagtam(config, CHANNELS, rng)
        features, _ = _inputs(rng, m=3)
        _, short = _inputs(rng, m=2)
        with pytest.raises(DimensionError):
            module(features, short)


class TestTemporalHeadFactory:
    def test_creates_both_kinds(self):
        rng = np.random.default_rng(0)
        assert isinstance(TemporalHeadFactory.create("tam", 10, TamConfig(), rng), TamHead)
        assert isinstance(TemporalHeadFactory.create("last_frame", 10, TamConfig(), rng), LastFrameHead)

    def test_unknown_kind(self):
        with pytest.raises(ConfigurationError, match="convlstm"):
            TemporalHeadFactory.create("convlstm", 10, TamConfig(), np.random.default_rng(0))

    def test_last_frame_slice(self):
        f = np.random.default_rng(1).normal(size=(2, 4, 10, 2, 2)).astype(np.float32)
        np.testing.assert_array_equal(LastFrameHead()(Tensor(f)).numpy(), f[:, -1])


class TestGradients:
    @pytest.mark.parametrize("layers", [1, 2])
    def test_late_fusion_at_float64(self, make_config, layers):
        rng = np.random.default_rng(10 + layers)
        with precision(np.float64):
            module = Cagtam(make_config(position="late", layers=layers), CHANNELS, rng)
            _activate_guidance(module)
            features, cam = _inputs(rng, b=1, m=3)
            weights = {
                "h_v": rng.normal(size=(1, 10, 2, 3)),
                "h_t": rng.normal(size=(1, 15, 2, 3)),
            }

            def loss(*_):
                out = module(features, InstrumentCAM(cam.cam, cam.logits))
                return (out.verb.h * weights["h_v"]).sum() + (out.h_t * weights["h_t"]).sum()

            points = [
                features,
                cam.cam,
                module.verb_attention.query.weight,
                module.verb_attention.key.weight,
                module.verb_head.stack.layers[0].conv.weight,
                module.verb_head.stack.layers[-1].norm.gamma,
            ]
            err = grad_check(loss, points, max_coordinates=30)
        assert err <= 1e-5
