function clamp(v) {
  return Math.min(Math.max(v, 0), 100);
}

module.exports = { clamp };
