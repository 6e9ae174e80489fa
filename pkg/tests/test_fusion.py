import random

import numpy as np
import pytest

from blocktalk.dataset.synthetic import SynthConfig, synth_generate
from blocktalk.fusion import (
    DialogueString,
    FusionConfig,
    FusionModel,
    ShapeMismatch,
    Vocab,
    decode_world_tensor,
    one_hot_encode,
)
from blocktalk.world import VoxelWorld

from .conftest import random_world

TINY = FusionConfig(
    conv_channels=(5, 6), embed_dim=6, heads=2, block_pairs=1,
    vocab_size=12, max_text_len=8, grid_dims=(3, 2, 3), seed=16,
)


def tiny_batch(rng=None):
    """Two random examples on the tiny grid; seeds chosen so no conv
    pre-activation sits near a ReLU kink (finite differences would cross it)."""
    rng = rng or np.random.default_rng(9)
    batch = []
    for label in (1, 0):
        codes = rng.integers(0, 7, size=TINY.grid_dims)
        tensor = np.eye(7)[codes].transpose(3, 0, 1, 2).astype(np.float64)
        ids = list(int(i) for i in rng.integers(0, TINY.vocab_size, size=6))
        batch.append((tensor, ids, label))
    return batch


class TestOneHot:
    def test_empty_world(self):
        tensor = one_hot_encode(VoxelWorld())
        assert tensor.shape == (7, 11, 9, 11)
        assert (tensor[0] == 1.0).all()
        assert tensor[1:].sum() == 0

    def test_single_block_flips_two_entries(self):
        from blocktalk.world import BlockColor

        world = VoxelWorld.from_blocks([(0, 0, 0, BlockColor.BLUE)])
        empty = one_hot_encode(VoxelWorld())
        tensor = one_hot_encode(world)
        assert int((tensor != empty).sum()) == 2

    def test_one_hot_invariant_and_inverse(self):
        rng = random.Random(2)
        for _ in range(25):
            world = random_world(rng, rng.randint(0, 80))
            tensor = one_hot_encode(world)
            assert tensor.sum() == 11 * 9 * 11
            assert (tensor.sum(axis=0) == 1.0).all()
            assert decode_world_tensor(tensor) == world


class TestDialogue:
    def test_role_tags_rendered_in_turn_order(self):
        d = DialogueString((("architect", "build a tower"), ("builder", "which color?")))
        assert d.render() == "architect build a tower builder which color?"

    def test_swapping_roles_changes_rendering(self):
        a = DialogueString((("architect", "one"), ("builder", "two")))
        b = DialogueString((("builder", "one"), ("architect", "two")))
        assert a.render() != b.render()

    def test_unknown_role_rejected(self):
        with pytest.raises(ValueError):
            DialogueString((("narrator", "hello"),))

    def test_vocab_unknown_token(self):
        vocab = Vocab.fit(["place the red block", "place the blue block"], max_size=8)
        ids = vocab.encode("place the purple slab")
        assert ids[0] != 0 and ids[1] != 0
        assert 0 in ids  # purple or slab fell out of vocabulary


class TestForward:
    def test_output_in_unit_interval(self):
        model = FusionModel(TINY)
        for tensor, ids, _ in tiny_batch():
            p = model.forward(tensor, ids)
            assert 0.0 < p < 1.0

    def test_zero_decoder_gives_half(self):
        model = FusionModel(TINY)
        model.params["dec_w"][:] = 0.0
        model.params["dec_b"] *= 0.0
        for tensor, ids, _ in tiny_batch():
            assert model.forward(tensor, ids) == 0.5

    def test_forward_deterministic_across_instances(self):
        batch = tiny_batch()
        values_one = [FusionModel(TINY).forward(t, ids) for t, ids, _ in batch]
        values_two = [FusionModel(TINY).forward(t, ids) for t, ids, _ in batch]
        for a, b in zip(values_one, values_two):
            assert abs(a - b) < 1e-12

    def test_shape_mismatch(self):
        model = FusionModel(TINY)
        with pytest.raises(ShapeMismatch):
            model.forward(np.zeros((7, 4, 4, 4)), [1, 2])

    def test_config_validation(self):
        with pytest.raises(ShapeMismatch):
            FusionConfig(embed_dim=6, heads=4, conv_channels=(6,))
        with pytest.raises(ShapeMismatch):
            FusionConfig(embed_dim=8, heads=2, conv_channels=(4, 6))


class TestBackward:
    def test_bce_at_half_is_ln2(self):
        model = FusionModel(TINY)
        model.params["dec_w"][:] = 0.0
        model.params["dec_b"] *= 0.0
        tensor, ids, _ = tiny_batch()[0]
        loss, _ = model.loss_and_grads([(tensor, ids, 1)])
        assert abs(loss - np.log(2.0)) < 1e-12

    def test_gradients_match_finite_differences(self):
        model = FusionModel(TINY)
        batch = tiny_batch()
        # precondition: no pre-activation within 10x eps of a ReLU kink
        eps = 1e-4
        for tensor, ids, _ in batch:
            _, cache = model._forward(tensor, ids)
            for _, pre in cache["conv"]:
                assert np.abs(pre).min() > 10 * eps

        _, grads = model.loss_and_grads(batch)
        worst = 0.0
        for name, arr in model.params.items():
            flat = arr.reshape(-1) if arr.ndim else arr.reshape(1)
            gflat = grads[name].reshape(-1) if grads[name].ndim else grads[name].reshape(1)
            for i in range(flat.size):
                orig = flat[i]
                flat[i] = orig + eps
                up = model.batch_loss(batch)
                flat[i] = orig - eps
                down = model.batch_loss(batch)
                flat[i] = orig
                fd = (up - down) / (2 * eps)
                rel = abs(gflat[i] - fd) / max(abs(gflat[i]), abs(fd), 1e-4)
                worst = max(worst, rel)
        assert worst < 1e-4, f"worst relative error {worst:.3e}"

    def test_training_reduces_loss_on_separable_set(self):
        # Worlds come from the corpus generator; tensors are cropped to the
        # tiny grid (a crop of a one-hot tensor is still one-hot) and the
        # label is whether the crop contains any block, which a conv plus
        # pooling stack separates linearly.
        result = synth_generate(SynthConfig(n_records=16, n_worlds=16, world_actions=12, seed=5))
        vocab = Vocab.fit([r.instruction for r in result.records], max_size=64)
        config = FusionConfig(
            conv_channels=(4, 6), embed_dim=6, heads=2, block_pairs=1,
            vocab_size=64, max_text_len=12, grid_dims=(3, 2, 3),
            learning_rate=0.5, seed=1,
        )
        model = FusionModel(config, vocab)
        batch = []
        for rec in result.records:
            crop = one_hot_encode(result.worlds[rec.world_ref])[:, 4:7, 0:2, 4:7]
            label = int(crop[1:].sum() > 0)
            batch.append((crop, DialogueString((("architect", rec.instruction),)), label))
        assert {label for _, _, label in batch} == {0, 1}
        initial = model.batch_loss(batch)
        for _ in range(200):
            model.backward_and_step(batch)
        assert model.batch_loss(batch) < initial

    def test_checkpoint_round_trip_bit_exact(self, tmp_path):
        vocab = Vocab.fit(["place a red block"], max_size=12)
        model = FusionModel(TINY, vocab)
        path = tmp_path / "fusion.ckpt"
        model.save(path)
        loaded = FusionModel.load(path)
        for name in model.params:
            assert np.array_equal(model.params[name], loaded.params[name])
        assert loaded.vocab.to_list() == vocab.to_list()
        # save -> load -> save produces identical bytes
        path_two = tmp_path / "fusion2.ckpt"
        loaded.save(path_two)
        assert path.read_bytes() == path_two.read_bytes()
