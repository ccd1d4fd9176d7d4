const { formatMoney } = require('./format');

function listItems(store) {
  return Object.values(store.items).map((item) => ({
    sku: item.sku,
    label: item.name + ' ' + formatMoney(item.price),
  }));
}

function handleRequest(store, request) {
  if (request.path === '/items') {
    return { status: 200, body: listItems(store) };
  }
  return { status: 404, body: null };
}

module.exports = { listItems, handleRequest };
