"""Curriculum scheduling: ordered lessons binding environment-parameter
values to progress thresholds."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Lesson:
    parameters: dict[str, float]
    threshold: float
    min_lesson_length: int = 1  # episodes
    measure: str = "mean_reward"  # mean_reward | progress


@dataclass
class LessonPlan:
    lessons: tuple[Lesson, ...]
    lesson_index: int = 0
    episodes_in_lesson: int = 0
    _rewards: list[float] = field(default_factory=list)

    def __post_init__(self):
        if not self.lessons:
            raise ValueError("a lesson plan needs at least one lesson")

    @property
    def current(self) -> Lesson:
        return self.lessons[self.lesson_index]

    def record_episode(self, reward: float) -> None:
        self.episodes_in_lesson += 1
        self._rewards.append(reward)

    def measure_value(self) -> float:
        if not self._rewards:
            return float("-inf")
        window = self._rewards[-self.current.min_lesson_length:]
        return sum(window) / len(window)

    def advance(self, measure_value: float | None = None) -> bool:
        """Advance exactly one lesson when the measure clears the current
        threshold and enough episodes have been seen; the final lesson is
        absorbing.  Returns True when the lesson changed."""
        if self.lesson_index >= len(self.lessons) - 1:
            return False
        if self.episodes_in_lesson < self.current.min_lesson_length:
            return False
        value = (self.measure_value() if measure_value is None
                 else measure_value)
        if value < self.current.threshold:
            return False
        self.lesson_index += 1
        self.episodes_in_lesson = 0
        self._rewards.clear()
        return True


def plan_from_config(entries: list[dict]) -> LessonPlan:
    lessons = tuple(
        Lesson(parameters=dict(e["parameters"]),
               threshold=float(e.get("threshold", float("inf"))),
               min_lesson_length=int(e.get("min_lesson_length", 1)),
               measure=e.get("measure", "mean_reward"))
        for e in entries)
    return LessonPlan(lessons)
