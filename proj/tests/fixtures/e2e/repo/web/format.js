function formatMoney(value) {
  return '$' + value.toFixed(2);
}

function padLeft(text, width) {
  return text.length >= width ? text : ' '.repeat(width - text.length) + text;
}

module.exports = { formatMoney, padLeft };
