"""Small fully-connected networks in numpy, trained full-batch with Adam."""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

VARIANCE_FLOOR = 1e-6


def _elu(z: np.ndarray) -> np.ndarray:
    return np.where(z > 0, z, np.expm1(np.minimum(z, 0.0)))


def _elu_grad(z: np.ndarray) -> np.ndarray:
    return np.where(z > 0, 1.0, np.exp(np.minimum(z, 0.0)))


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * z))


class MLP:
    """ReLU hidden layers, linear output."""

    def __init__(self, sizes: Sequence[int], rng: Optional[np.random.Generator] = None,
                 init_scale: float = 0.1):
        rng = rng if rng is not None else np.random.default_rng(0)
        self.sizes = list(sizes)
        self.weights: List[np.ndarray] = []
        self.biases: List[np.ndarray] = []
        for fan_in, fan_out in zip(self.sizes[:-1], self.sizes[1:]):
            self.weights.append(rng.uniform(-init_scale, init_scale, size=(fan_in, fan_out)))
            self.biases.append(rng.uniform(-init_scale, init_scale, size=(fan_out,)))
        self._cache: List[Tuple[np.ndarray, np.ndarray]] = []

    @property
    def params(self) -> List[np.ndarray]:
        return self.weights + self.biases

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._cache = []
        h = x
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = h @ w + b
            self._cache.append((h, z))
            h = z if i == last else np.maximum(z, 0.0)
        return h

    def backward(self, grad_out: np.ndarray) -> List[np.ndarray]:
        """Gradients for `params` given dLoss/dOutput of the last forward pass."""
        grad_w: List[np.ndarray] = [None] * len(self.weights)
        grad_b: List[np.ndarray] = [None] * len(self.biases)
        grad = grad_out
        for i in reversed(range(len(self.weights))):
            h, z = self._cache[i]
            if i != len(self.weights) - 1:
                grad = grad * (z > 0)
            grad_w[i] = h.T @ grad
            grad_b[i] = grad.sum(axis=0)
            grad = grad @ self.weights[i].T
        return grad_w + grad_b

    def to_dict(self) -> Dict:
        return {
            'sizes': self.sizes,
            'weights': [w.ravel().tolist() for w in self.weights],
            'biases': [b.tolist() for b in self.biases],
        }

    @classmethod
    def from_dict(cls, data: Dict) -> 'MLP':
        net = cls(data['sizes'])
        net.weights = [np.asarray(w, dtype=float).reshape(fan_in, fan_out)
                       for w, fan_in, fan_out in zip(data['weights'], net.sizes[:-1], net.sizes[1:])]
        net.biases = [np.asarray(b, dtype=float) for b in data['biases']]
        return net


class Adam:
    def __init__(self, params: List[np.ndarray], lr: float = 1e-3, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        self.params = params
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, grads: List[np.ndarray]) -> None:
        self.t += 1
        correction1 = 1.0 - self.beta1 ** self.t
        correction2 = 1.0 - self.beta2 ** self.t
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.lr * (m / correction1) / (np.sqrt(v / correction2) + self.eps)


class Standardizer:
    """Per-column affine normalization; constant columns get unit scale."""

    def __init__(self, mean: np.ndarray, std: np.ndarray):
        self.mean = np.asarray(mean, dtype=float)
        self.std = np.asarray(std, dtype=float)

    @classmethod
    def fit(cls, data: np.ndarray) -> 'Standardizer':
        std = data.std(axis=0)
        std = np.where(std < 1e-6, 1.0, std)
        return cls(data.mean(axis=0), std)

    def transform(self, data: np.ndarray) -> np.ndarray:
        return (data - self.mean) / self.std

    def inverse(self, data: np.ndarray) -> np.ndarray:
        return data * self.std + self.mean

    def to_dict(self) -> Dict:
        return {'mean': self.mean.tolist(), 'std': self.std.tolist()}

    @classmethod
    def from_dict(cls, data: Dict) -> 'Standardizer':
        return cls(np.asarray(data['mean']), np.asarray(data['std']))


class GaussianRegressor:
    """Maps an input vector to a diagonal Gaussian over outputs."""

    def __init__(self, net: MLP, x_norm: Standardizer, y_norm: Standardizer):
        self.net = net
        self.x_norm = x_norm
        self.y_norm = y_norm

    @property
    def output_dim(self) -> int:
        return self.net.sizes[-1] // 2

    @classmethod
    def fit(cls, x: np.ndarray, y: np.ndarray, hidden: Sequence[int], epochs: int,
            lr: float, rng: np.random.Generator) -> 'GaussianRegressor':
        x_norm, y_norm = Standardizer.fit(x), Standardizer.fit(y)
        xs, ys = x_norm.transform(x), y_norm.transform(y)
        d = y.shape[1]
        net = MLP([x.shape[1], *hidden, 2 * d], rng)
        opt = Adam(net.params, lr=lr)
        n = len(xs)
        loss = float('nan')
        for _ in range(epochs):
            out = net.forward(xs)
            mean, raw = out[:, :d], out[:, d:]
            var = _elu(raw) + 1.0 + VARIANCE_FLOOR
            diff = mean - ys
            loss = 0.5 * float(np.mean(np.sum(np.log(var) + diff ** 2 / var, axis=1)))
            grad_mean = diff / var / n
            grad_var = 0.5 * (1.0 / var - diff ** 2 / var ** 2) / n
            grad = np.concatenate([grad_mean, grad_var * _elu_grad(raw)], axis=1)
            opt.step(net.backward(grad))
        logger.debug("Generator trained for %d epochs, final NLL %.4f", epochs, loss)
        return cls(net, x_norm, y_norm)

    def predict(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Mean and per-dimension variance in output units."""
        out = self.net.forward(self.x_norm.transform(np.atleast_2d(x)))
        d = self.output_dim
        var = _elu(out[:, d:]) + 1.0 + VARIANCE_FLOOR
        mean = self.y_norm.inverse(out[:, :d])
        return mean, var * self.y_norm.std ** 2

    def sample(self, x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        mean, var = self.predict(x)
        return mean[0] + np.sqrt(var[0]) * rng.standard_normal(self.output_dim)

    def to_dict(self) -> Dict:
        return {'net': self.net.to_dict(), 'x_norm': self.x_norm.to_dict(),
                'y_norm': self.y_norm.to_dict()}

    @classmethod
    def from_dict(cls, data: Dict) -> 'GaussianRegressor':
        return cls(MLP.from_dict(data['net']), Standardizer.from_dict(data['x_norm']),
                   Standardizer.from_dict(data['y_norm']))


class BinaryClassifier:
    """Logistic output trained with binary cross-entropy."""

    def __init__(self, net: MLP, x_norm: Standardizer):
        self.net = net
        self.x_norm = x_norm

    @classmethod
    def fit(cls, x: np.ndarray, labels: np.ndarray, hidden: Sequence[int], epochs: int,
            lr: float, rng: np.random.Generator) -> 'BinaryClassifier':
        x_norm = Standardizer.fit(x)
        xs = x_norm.transform(x)
        targets = labels.reshape(-1, 1).astype(float)
        net = MLP([x.shape[1], *hidden, 1], rng)
        opt = Adam(net.params, lr=lr)
        n = len(xs)
        for _ in range(epochs):
            logits = net.forward(xs)
            opt.step(net.backward((_sigmoid(logits) - targets) / n))
        return cls(net, x_norm)

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        return _sigmoid(self.net.forward(self.x_norm.transform(np.atleast_2d(x))))[:, 0]

    def to_dict(self) -> Dict:
        return {'net': self.net.to_dict(), 'x_norm': self.x_norm.to_dict()}

    @classmethod
    def from_dict(cls, data: Dict) -> 'BinaryClassifier':
        return cls(MLP.from_dict(data['net']), Standardizer.from_dict(data['x_norm']))
