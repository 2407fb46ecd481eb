"""Model text formats: the native JSON document and the classic .pomdp format.

The native grammar is documented in docs/model_format.md. Rows whose sums are
off by at most 1e-6 (text round-off) are renormalized on input; anything
worse is a semantic error.
"""

from __future__ import annotations

import json
from typing import Optional, Union

import numpy as np

from .models import DiscretePomdp, MomdpModel, assert_valid

PARSE_ROW_TOL = 1e-6


class ModelParseError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None, col: Optional[int] = None):
        self.line, self.col = line, col
        where = f" (line {line}" + (f", col {col})" if col is not None else ")") if line else ""
        super().__init__(message + where)


def _renormalize_rows(arr: np.ndarray, what: str) -> np.ndarray:
    sums = arr.sum(axis=-1)
    bad = np.abs(sums - 1.0) > PARSE_ROW_TOL
    if np.any(bad):
        idx = tuple(int(i) for i in np.argwhere(bad)[0])
        raise ModelParseError(
            f"{what} row {idx} sums to {sums[bad][0]:.9g}, outside the 1e-6 tolerance"
        )
    if np.any(arr < -1e-12):
        idx = tuple(int(i) for i in np.argwhere(arr < -1e-12)[0])
        raise ModelParseError(f"{what} entry {idx} is negative")
    return np.clip(arr, 0.0, None) / sums[..., None]


def _field(doc: dict, name: str, kind=None):
    if name not in doc:
        raise ModelParseError(f"missing required field '{name}'")
    value = doc[name]
    if kind is not None and not isinstance(value, kind):
        raise ModelParseError(f"field '{name}' has the wrong type")
    return value


def _array(doc: dict, name: str, shape: tuple) -> np.ndarray:
    raw = _field(doc, name)
    try:
        arr = np.asarray(raw, dtype=np.float64)
    except (TypeError, ValueError):
        raise ModelParseError(f"field '{name}' is not a numeric array") from None
    if arr.shape != shape:
        raise ModelParseError(
            f"field '{name}' has shape {arr.shape}, expected {shape}"
        )
    return arr


def _parse_json_pomdp(doc: dict) -> DiscretePomdp:
    s = int(_field(doc, "states", int))
    a = int(_field(doc, "actions", int))
    o = int(_field(doc, "observations", int))
    t = _renormalize_rows(_array(doc, "transition", (s, a, s)), "transition")
    z = _renormalize_rows(_array(doc, "observation", (s, a, o)), "observation")
    r = _array(doc, "reward", (s, a, s))
    b0 = _array(doc, "initial_belief", (s,))
    if abs(b0.sum() - 1.0) > PARSE_ROW_TOL or np.any(b0 < -1e-12):
        raise ModelParseError("initial_belief is not a probability vector")
    b0 = np.clip(b0, 0.0, None) / b0.sum()
    return DiscretePomdp(t, z, r, float(_field(doc, "discount")), b0)


def _parse_json_momdp(doc: dict) -> MomdpModel:
    states = _field(doc, "states", dict)
    if "observed" not in states or "hidden" not in states:
        raise ModelParseError("momdp 'states' must carry 'observed' and 'hidden' counts")
    nx, ny = int(states["observed"]), int(states["hidden"])
    na = int(_field(doc, "actions", int))
    no = int(_field(doc, "observations", int))
    t = _array(doc, "transition", (nx, ny, na, nx, ny))
    t = _renormalize_rows(t.reshape(nx, ny, na, nx * ny), "transition").reshape(
        nx, ny, na, nx, ny
    )
    z = _renormalize_rows(_array(doc, "observation", (nx, ny, na, no)), "observation")
    raw_r = np.asarray(_field(doc, "reward"), dtype=np.float64)
    if raw_r.shape == (nx, na, nx):  # hidden-independent compact layout
        r = raw_r[:, None, :, :, None]
    elif raw_r.shape == (nx, ny, na, nx, ny):
        r = raw_r
    else:
        raise ModelParseError(
            f"field 'reward' has shape {raw_r.shape}, expected "
            f"{(nx, ny, na, nx, ny)} or compact {(nx, na, nx)}"
        )
    b0 = _array(doc, "initial_hidden_belief", (ny,))
    if abs(b0.sum() - 1.0) > PARSE_ROW_TOL or np.any(b0 < -1e-12):
        raise ModelParseError("initial_hidden_belief is not a probability vector")
    b0 = np.clip(b0, 0.0, None) / b0.sum()
    return MomdpModel(
        t, z, r, float(_field(doc, "discount")), int(_field(doc, "initial_observed", int)), b0
    )


def _parse_json(text: str) -> Union[DiscretePomdp, MomdpModel]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise ModelParseError("top-level document must be an object")
    kind = doc.get("type")
    if kind is None:
        kind = "momdp" if isinstance(doc.get("states"), dict) else "pomdp"
    if kind == "pomdp":
        model = _parse_json_pomdp(doc)
    elif kind == "momdp":
        model = _parse_json_momdp(doc)
    else:
        raise ModelParseError(f"unknown model type '{kind}'")
    assert_valid(model)
    return model


class _PomdpFileParser:
    """Line-oriented parser for the classic plain-text .pomdp benchmark format."""

    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.pos = 0
        self.discount = None
        self.values = "reward"
        self.states = None
        self.actions = None
        self.observations = None
        self.start = None
        self.t = None
        self.z = None
        self.r = None

    def error(self, msg: str):
        raise ModelParseError(msg, line=self.pos)

    def _next_data_line(self) -> Optional[str]:
        while self.pos < len(self.lines):
            raw = self.lines[self.pos]
            self.pos += 1
            stripped = raw.split("#", 1)[0].strip()
            if stripped:
                return stripped
        return None

    def _peek_numeric_line(self) -> Optional[list]:
        save = self.pos
        line = self._next_data_line()
        if line is None:
            return None
        try:
            return [float(tok) for tok in line.split()]
        except ValueError:
            self.pos = save
            return None

    @staticmethod
    def _names(tokens: list) -> Union[int, list]:
        if len(tokens) == 1 and tokens[0].isdigit():
            return int(tokens[0])
        return tokens

    def _index(self, token: str, names, count: int, what: str):
        if token == "*":
            return None
        if isinstance(names, list) and token in names:
            return names.index(token)
        try:
            i = int(token)
        except ValueError:
            self.error(f"unknown {what} '{token}'")
        if not 0 <= i < count:
            self.error(f"{what} index {i} out of range")
        return i

    def parse(self) -> DiscretePomdp:
        while True:
            line = self._next_data_line()
            if line is None:
                break
            head, _, rest = line.partition(":")
            head = head.strip().lower()
            rest = rest.strip()
            if head == "discount":
                self.discount = self._float(rest)
            elif head == "values":
                self.values = rest.lower()
            elif head == "states":
                self.states = self._names(rest.split())
            elif head == "actions":
                self.actions = self._names(rest.split())
            elif head == "observations":
                self.observations = self._names(rest.split())
            elif head == "start":
                self._ensure_dims()
                self.start = self._parse_start(rest)
            elif head in ("t", "o", "r"):
                self._ensure_dims()
                self._parse_entry(head, rest)
            else:
                self.error(f"unknown keyword '{head}'")
        return self._finish()

    def _count(self, names) -> int:
        return names if isinstance(names, int) else len(names)

    def _ensure_dims(self):
        for field_name in ("discount", "states", "actions", "observations"):
            if getattr(self, field_name) is None:
                self.error(f"'{field_name}:' must appear before model entries")
        if self.t is None:
            s, a, o = map(self._count, (self.states, self.actions, self.observations))
            self.t = np.zeros((s, a, s))
            self.z = np.zeros((s, a, o))
            self.r = np.zeros((s, a, s))

    def _parse_start(self, rest: str) -> np.ndarray:
        s = self._count(self.states)
        if rest.lower() == "uniform" or not rest:
            return np.full(s, 1.0 / s)
        tokens = rest.split()
        if len(tokens) == 1 and not _is_number(tokens[0]):
            b = np.zeros(s)
            b[self._index(tokens[0], self.states, s, "state")] = 1.0
            return b
        if len(tokens) != s:
            self.error(f"start distribution has {len(tokens)} entries, expected {s}")
        return np.asarray([self._float(t) for t in tokens])

    def _entry_indices(self, parts, specs):
        out = []
        for token, (names, what) in zip(parts, specs):
            count = self._count(names)
            idx = self._index(token.strip(), names, count, what)
            out.append(range(count) if idx is None else [idx])
        return out

    def _parse_entry(self, kind: str, rest: str):
        parts = [p.strip() for p in rest.split(":")]
        s_names, a_names, o_names = self.states, self.actions, self.observations
        if kind == "t":
            self._parse_prob_entry(
                parts, self.t, (a_names, "action"), (s_names, "state"),
                (s_names, "state"), self._count(s_names),
            )
        elif kind == "o":
            self._parse_prob_entry(
                parts, self.z, (a_names, "action"), (s_names, "state"),
                (o_names, "observation"), self._count(o_names),
            )
        else:
            self._parse_reward_entry(parts)

    def _float(self, token: str) -> float:
        try:
            return float(token)
        except ValueError:
            self.error(f"expected a number, got '{token}'")

    def _parse_prob_entry(self, parts, tensor, a_spec, row_spec, col_spec, ncols):
        # forms: [a], [a, s], [a, s, "s' p"] / [a, s, s'] with the value on the next line
        if len(parts) == 1:
            a_range = self._entry_indices(parts, [a_spec])[0]
            line = self._next_data_line()
            if line is None:
                self.error("matrix expected after entry header")
            nrows = tensor.shape[0]
            if line.lower() == "uniform":
                block = np.full((nrows, ncols), 1.0 / ncols)
            elif line.lower() == "identity":
                if nrows != ncols:
                    self.error("identity matrix on non-square entry")
                block = np.eye(nrows)
            else:
                rows = [line]
                for _ in range(nrows - 1):
                    nxt = self._next_data_line()
                    if nxt is None:
                        self.error("matrix ended early")
                    rows.append(nxt)
                try:
                    block = np.asarray([[float(v) for v in row.split()] for row in rows])
                except ValueError:
                    self.error("non-numeric matrix row")
                if block.shape != (nrows, ncols):
                    self.error(f"matrix has shape {block.shape}, expected {(nrows, ncols)}")
            for a in a_range:
                tensor[:, a, :] = block
            return
        if len(parts) == 2:
            a_range, row_range = self._entry_indices(parts, [a_spec, row_spec])
            line = self._next_data_line()
            if line is None:
                self.error("row expected after entry header")
            if line.lower() == "uniform":
                row = np.full(ncols, 1.0 / ncols)
            else:
                try:
                    row = np.asarray([float(v) for v in line.split()])
                except ValueError:
                    self.error("non-numeric row")
                if row.shape != (ncols,):
                    self.error(f"row has {row.shape[0]} entries, expected {ncols}")
            for a in a_range:
                for i in row_range:
                    tensor[i, a, :] = row
            return
        if len(parts) == 3:
            tail = parts[2].split()
            if len(tail) == 2:
                col_token, value = tail[0], self._float(tail[1])
            elif len(tail) == 1:
                col_token = tail[0]
                nums = self._peek_numeric_line()
                if not nums or len(nums) != 1:
                    self.error("probability value expected")
                value = nums[0]
            else:
                self.error("malformed entry tail")
            a_range, row_range = self._entry_indices(parts[:2], [a_spec, row_spec])
            col_idx = self._index(col_token, col_spec[0], ncols, col_spec[1])
            cols = range(ncols) if col_idx is None else [col_idx]
            for a in a_range:
                for i in row_range:
                    for j in cols:
                        tensor[i, a, j] = value
            return
        self.error("too many ':' separators in entry")

    def _parse_reward_entry(self, parts):
        # forms: R: a : s : s' : o v   (o must be '*'; rewards do not vary by o here)
        #        R: a : s : s' v       (value inline or on the next line)
        ns = self._count(self.states)
        if len(parts) == 4:
            sp_token = parts[2]
            tail = parts[3].split()
            if len(tail) == 2:
                o_token, value = tail[0], self._float(tail[1])
            elif len(tail) == 1:
                o_token = tail[0]
                nums = self._peek_numeric_line()
                if not nums or len(nums) != 1:
                    self.error("reward value expected")
                value = nums[0]
            else:
                self.error("malformed reward entry")
            if o_token != "*":
                self.error("per-observation rewards are not representable; use '*'")
        elif len(parts) == 3:
            tail = parts[2].split()
            if len(tail) == 2:
                sp_token, value = tail[0], self._float(tail[1])
            elif len(tail) == 1:
                sp_token = tail[0]
                nums = self._peek_numeric_line()
                if not nums or len(nums) != 1:
                    self.error("reward value expected")
                value = nums[0]
            else:
                self.error("malformed reward entry")
        else:
            self.error("reward entries need 'R: a : s : s' [: o] value'")
        a_range, s_range = self._entry_indices(
            parts[:2], [(self.actions, "action"), (self.states, "state")]
        )
        sp_idx = self._index(sp_token.strip(), self.states, ns, "state")
        sp_range = range(ns) if sp_idx is None else [sp_idx]
        for a in a_range:
            for s in s_range:
                for sp in sp_range:
                    self.r[s, a, sp] = value

    def _finish(self) -> DiscretePomdp:
        if self.t is None:
            self.error("file declares no model entries")
        t = _renormalize_rows(self.t, "transition")
        z = _renormalize_rows(self.z, "observation")
        r = self.r if self.values != "cost" else -self.r
        s = t.shape[0]
        b0 = self.start if self.start is not None else np.full(s, 1.0 / s)
        if abs(b0.sum() - 1.0) > PARSE_ROW_TOL or np.any(b0 < -1e-12):
            self.error("start distribution is not a probability vector")
        b0 = np.clip(b0, 0.0, None) / b0.sum()
        model = DiscretePomdp(t, z, r, self.discount, b0)
        assert_valid(model)
        return model


def _is_number(token: str) -> bool:
    try:
        float(token)
        return True
    except ValueError:
        return False


def parse_model_file(text: str) -> Union[DiscretePomdp, MomdpModel]:
    """Parse either the native JSON document or a classic .pomdp file."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return _parse_json(text)
    return _PomdpFileParser(text).parse()


def serialize_model(model: Union[DiscretePomdp, MomdpModel]) -> str:
    """Native JSON document; round-trips through parse_model_file."""
    if isinstance(model, MomdpModel):
        base = model.reward.base if model.reward.base is not None else model.reward
        nx, ny, na = model.num_observed, model.num_hidden, model.num_actions
        if base.shape == (nx, 1, na, nx, 1):
            reward = base[:, 0, :, :, 0].tolist()
        else:
            reward = np.ascontiguousarray(model.reward).tolist()
        doc = {
            "type": "momdp",
            "discount": model.discount,
            "states": {"observed": nx, "hidden": ny},
            "actions": na,
            "observations": model.num_observations,
            "transition": model.transition.tolist(),
            "observation": model.observation.tolist(),
            "reward": reward,
            "initial_observed": model.initial_observed,
            "initial_hidden_belief": model.initial_hidden_belief.tolist(),
        }
    else:
        doc = {
            "type": "pomdp",
            "discount": model.discount,
            "states": model.num_states,
            "actions": model.num_actions,
            "observations": model.num_observations,
            "transition": model.transition.tolist(),
            "observation": model.observation.tolist(),
            "reward": model.reward.tolist(),
            "initial_belief": model.initial_belief.tolist(),
        }
    return json.dumps(doc, indent=2)


def load_model(path) -> Union[DiscretePomdp, MomdpModel]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_model_file(fh.read())


def save_model(model, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_model(model))
